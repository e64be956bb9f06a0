//! C ABI over the `qccilc` library.
//!
//! Operators and ILC ansätze cross the boundary as opaque heap handles that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns a [`QccStatus`]; on failure the message is kept per thread
//! and can be copied out with [`qcc_last_error_message`]. Strings returned
//! by the library are released with [`qcc_string_free`].
//!
//! # Safety
//!
//! Every pointer argument must be null or valid for the access its type
//! implies. String inputs are nul-terminated UTF-8. Handles must come from
//! this library, be freed at most once and not be used after being freed.
//! Null inputs are reported as `QCC_STATUS_INVALID_ARGUMENT`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qccilc::dressing::{self, Direction, PipelineConfig};
use qccilc::fermion::{parse_fcidump, qubit_hamiltonian, Mapping, SpinOrdering};
use qccilc::ilc::{optimize_ilc, IlcAnsatz, IlcOptions, Reference};
use qccilc::pauli::text;
use qccilc::{Bits, Error, SparsePauliOp};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QccStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 1,
    /// Malformed input text or mismatched qubit counts.
    Input = 2,
    /// No anti-commuting entangler set exists.
    Infeasible = 3,
    NonConvergence = 4,
    /// A documented precondition was violated.
    Contract = 5,
    /// The library panicked; the handle arguments are left untouched.
    Internal = 6,
}

/// `U_ILC` applied as `U†HU` (inverse) or `UHU†` (forward).
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QccDirection {
    Inverse = 0,
    Forward = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QccMapping {
    JordanWigner = 0,
    Parity = 1,
}

/// Sparse Pauli operator handle.
pub struct QccOperator(SparsePauliOp);

/// ILC ansatz handle.
pub struct QccIlcAnsatz(IlcAnsatz);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QccStatus {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::Dimension { .. }
        | Error::CapExceeded { .. } => QccStatus::Input,
        Error::Infeasible { .. } => QccStatus::Infeasible,
        Error::NonConvergence { .. } => QccStatus::NonConvergence,
        Error::Contract(_) | Error::ReferenceDominated(_) => QccStatus::Contract,
    }
}

enum Failure {
    Arg(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> QccStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QccStatus::Ok
        }
        Ok(Err(Failure::Arg(what))) => {
            set_error(format!("invalid argument: {what}"));
            QccStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            QccStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Arg(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Arg(what))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Arg(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Arg(what))
}

unsafe fn bits_arg(p: *const c_char, n_qubits: usize) -> Result<Bits, Failure> {
    let b: Bits = str_arg(p, "reference")?.parse()?;
    if b.len() != n_qubits {
        return Err(Error::Dimension {
            expected: n_qubits,
            found: b.len(),
        }
        .into());
    }
    Ok(b)
}

fn boxed_op(op: SparsePauliOp) -> *mut QccOperator {
    Box::into_raw(Box::new(QccOperator(op)))
}

/// Copies the calling thread's last error message into `buf` (always nul
/// terminated when `len > 0`) and returns the full message length, or 0
/// when the last call succeeded.
#[no_mangle]
pub unsafe extern "C" fn qcc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn qcc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qcc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `.pauli` text.
#[no_mangle]
pub unsafe extern "C" fn qcc_operator_parse(
    text: *const c_char,
    out: *mut *mut QccOperator,
) -> QccStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let op = text::parse(str_arg(text, "text")?)?;
        *out = boxed_op(op);
        Ok(())
    })
}

/// Maps FCIDUMP text to a qubit Hamiltonian with blocked spin ordering. A
/// negative `spin_penalty` disables the penalty term. When `reference_out`
/// is non-null it receives the Hartree–Fock bitstring (free with
/// `qcc_string_free`).
#[no_mangle]
pub unsafe extern "C" fn qcc_operator_from_fcidump(
    text: *const c_char,
    mapping: QccMapping,
    spin_penalty: f64,
    out: *mut *mut QccOperator,
    reference_out: *mut *mut c_char,
) -> QccStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let fi = parse_fcidump(str_arg(text, "text")?)?;
        let mapping = match mapping {
            QccMapping::JordanWigner => Mapping::Jw,
            QccMapping::Parity => Mapping::Parity,
        };
        let mu = (spin_penalty >= 0.0).then_some(spin_penalty);
        let h = qubit_hamiltonian(&fi, SpinOrdering::Blocked, mapping, mu)?;
        if let Some(r) = reference_out.as_mut() {
            let hf = qccilc::fermion::hartree_fock_bitstring(&fi, SpinOrdering::Blocked, mapping)?;
            *r = CString::new(hf.to_string())
                .expect("bits have no nul")
                .into_raw();
        }
        *out = boxed_op(h);
        Ok(())
    })
}

/// Releases an operator. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qcc_operator_free(op: *mut QccOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Qubit count, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn qcc_operator_n_qubits(op: *const QccOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.n_qubits())
}

/// Number of stored terms, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn qcc_operator_len(op: *const QccOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.len())
}

/// Serializes to `.pauli` text; free the result with `qcc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qcc_operator_to_string(
    op: *const QccOperator,
    out: *mut *mut c_char,
) -> QccStatus {
    guard(|| {
        let op = ref_arg(op, "op")?;
        let out = out_arg(out, "out")?;
        *out = CString::new(text::serialize(&op.0))
            .expect("no interior nul")
            .into_raw();
        Ok(())
    })
}

/// `⟨b|H|b⟩` for a computational basis state written qubit 0 first.
#[no_mangle]
pub unsafe extern "C" fn qcc_basis_energy(
    op: *const QccOperator,
    bits: *const c_char,
    out: *mut f64,
) -> QccStatus {
    guard(|| {
        let op = ref_arg(op, "op")?;
        let out = out_arg(out, "out")?;
        let b = bits_arg(bits, op.0.n_qubits())?;
        *out = qccilc::mean_field::basis_expectation(&op.0, &b);
        Ok(())
    })
}

/// Exact ground-state energy (dense or Lanczos, within the size caps).
#[no_mangle]
pub unsafe extern "C" fn qcc_ground_energy(op: *const QccOperator, out: *mut f64) -> QccStatus {
    guard(|| {
        let op = ref_arg(op, "op")?;
        let out = out_arg(out, "out")?;
        *out = qccilc::sim::ground_state(&op.0, &Default::default())?.energy;
        Ok(())
    })
}

/// Selects `n` anti-commuting entanglers from the DIS at `reference` and
/// returns the optimal ILC ansatz and its energy.
#[no_mangle]
pub unsafe extern "C" fn qcc_ilc_optimize(
    op: *const QccOperator,
    reference: *const c_char,
    n: usize,
    out: *mut *mut QccIlcAnsatz,
    energy: *mut f64,
) -> QccStatus {
    guard(|| {
        let op = ref_arg(op, "op")?;
        let out = out_arg(out, "out")?;
        let energy = out_arg(energy, "energy")?;
        let phi = bits_arg(reference, op.0.n_qubits())?;
        let candidates: Vec<Bits> = qccilc::dis::build_dis(&op.0, &phi)?
            .into_iter()
            .map(|p| p.flip_x)
            .collect();
        let set = qccilc::anticom::find_anticommuting_set(
            &candidates,
            op.0.n_qubits(),
            n,
            &Default::default(),
        )?;
        let r = optimize_ilc(
            &op.0,
            &Reference::Basis(phi),
            &set.words,
            &IlcOptions::default(),
        )?;
        *energy = r.energy;
        *out = Box::into_raw(Box::new(QccIlcAnsatz(r.ansatz)));
        Ok(())
    })
}

/// Releases an ansatz. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qcc_ilc_free(a: *mut QccIlcAnsatz) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Entangler count, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn qcc_ilc_len(a: *const QccIlcAnsatz) -> usize {
    a.as_ref().map_or(0, |a| a.0.len())
}

/// Rotation angle `τ`, or NaN for null.
#[no_mangle]
pub unsafe extern "C" fn qcc_ilc_tau(a: *const QccIlcAnsatz) -> f64 {
    a.as_ref().map_or(f64::NAN, |a| a.0.tau())
}

/// Copies up to `len` amplitudes into `alphas`; returns the entangler count.
#[no_mangle]
pub unsafe extern "C" fn qcc_ilc_alphas(
    a: *const QccIlcAnsatz,
    alphas: *mut f64,
    len: usize,
) -> usize {
    let Some(a) = a.as_ref() else { return 0 };
    if !alphas.is_null() {
        for (i, v) in a.0.alphas().iter().take(len).enumerate() {
            *alphas.add(i) = *v;
        }
    }
    a.0.len()
}

/// Entangler `index` as text (`"Y0 X1"`); free with `qcc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qcc_ilc_entangler(
    a: *const QccIlcAnsatz,
    index: usize,
    out: *mut *mut c_char,
) -> QccStatus {
    guard(|| {
        let a = ref_arg(a, "ansatz")?;
        let out = out_arg(out, "out")?;
        let w = a.0.entanglers().get(index).ok_or(Failure::Arg("index"))?;
        *out = CString::new(w.to_string())
            .expect("no interior nul")
            .into_raw();
        Ok(())
    })
}

/// Exact ILC dressing of `op`.
#[no_mangle]
pub unsafe extern "C" fn qcc_dress_ilc(
    op: *const QccOperator,
    ansatz: *const QccIlcAnsatz,
    direction: QccDirection,
    out: *mut *mut QccOperator,
) -> QccStatus {
    guard(|| {
        let op = ref_arg(op, "op")?;
        let a = ref_arg(ansatz, "ansatz")?;
        let out = out_arg(out, "out")?;
        let dir = match direction {
            QccDirection::Inverse => Direction::Inverse,
            QccDirection::Forward => Direction::Forward,
        };
        *out = boxed_op(dressing::dress_ilc(&op.0, &a.0, dir)?);
        Ok(())
    })
}

/// `d` rounds of `n`-entangler ILC dressing from `reference` (null picks the
/// mean-field determinant), then a QCC energy with `m` entanglers
/// (`m = 0` reports the final reference energy). `dressed` may be null.
#[no_mangle]
pub unsafe extern "C" fn qcc_pipeline(
    op: *const QccOperator,
    reference: *const c_char,
    d: usize,
    n: usize,
    m: usize,
    energy: *mut f64,
    dressed: *mut *mut QccOperator,
) -> QccStatus {
    guard(|| {
        let op = ref_arg(op, "op")?;
        let energy = out_arg(energy, "energy")?;
        let initial_reference = if reference.is_null() {
            None
        } else {
            Some(bits_arg(reference, op.0.n_qubits())?)
        };
        let cfg = PipelineConfig {
            d,
            n,
            m,
            initial_reference,
            ..PipelineConfig::default()
        };
        let r = dressing::run_pipeline(&op.0, &cfg)?;
        *energy = if m > 0 {
            dressing::final_qcc(r.final_hamiltonian(), &r.final_reference, &cfg)?.energy
        } else {
            r.final_reference_energy
        };
        if let Some(slot) = dressed.as_mut() {
            *slot = boxed_op(r.final_hamiltonian().clone());
        }
        Ok(())
    })
}

/// Worst-case term growth factor `(N² + N + 2)/2`.
#[no_mangle]
pub extern "C" fn qcc_growth_worst(n: usize) -> f64 {
    dressing::growth_worst(n)
}

/// Average term growth factor `(N² + N + 4)/4`.
#[no_mangle]
pub extern "C" fn qcc_growth_avg(n: usize) -> f64 {
    dressing::growth_avg(n)
}
