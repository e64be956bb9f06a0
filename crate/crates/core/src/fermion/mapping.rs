use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FermionIntegrals, FermionOp, Ladder, SpinOrdering};
use crate::error::{Error, Result};
use crate::pauli::{
    Bits, OpBuilder, PauliWord, SingleQubit, SparsePauliOp, DEFAULT_PRUNE_THRESHOLD,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mapping {
    #[default]
    Jw,
    Parity,
}

impl FromStr for Mapping {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jw" | "jordan-wigner" => Ok(Mapping::Jw),
            "parity" => Ok(Mapping::Parity),
            _ => Err(Error::parse(0, format!("unknown mapping {s:?}"))),
        }
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mapping::Jw => "jw",
            Mapping::Parity => "parity",
        })
    }
}

/// Two-word image `½(A ∓ iB)` of one ladder operator.
fn ladder_image(l: Ladder, n_modes: usize, mapping: Mapping) -> [(PauliWord, Complex64); 2] {
    let p = l.mode;
    let mut a = PauliWord::identity(n_modes);
    let mut b = PauliWord::identity(n_modes);
    match mapping {
        Mapping::Jw => {
            // a†_p = ½(X_p − iY_p) Z_{p−1}…Z_0
            for q in 0..p {
                a.set(q, SingleQubit::Z);
                b.set(q, SingleQubit::Z);
            }
            a.set(p, SingleQubit::X);
            b.set(p, SingleQubit::Y);
        }
        Mapping::Parity => {
            // a†_p = ½(Z_{p−1} X_p − iY_p) X_{p+1}…X_{n−1}
            if p > 0 {
                a.set(p - 1, SingleQubit::Z);
            }
            a.set(p, SingleQubit::X);
            b.set(p, SingleQubit::Y);
            for q in p + 1..n_modes {
                a.set(q, SingleQubit::X);
                b.set(q, SingleQubit::X);
            }
        }
    }
    let im = if l.dagger { -0.5 } else { 0.5 };
    [(a, Complex64::new(0.5, 0.0)), (b, Complex64::new(0.0, im))]
}

pub fn map_to_qubits(f: &FermionOp, n_modes: usize, mapping: Mapping) -> Result<SparsePauliOp> {
    if let Some(m) = f.max_mode() {
        if m >= n_modes {
            return Err(Error::contract(format!(
                "mode {m} out of range for {n_modes} modes"
            )));
        }
    }
    let mut out = OpBuilder::new(n_modes, DEFAULT_PRUNE_THRESHOLD);
    for (coeff, string) in f.terms() {
        let mut partial = vec![(PauliWord::identity(n_modes), *coeff)];
        for &l in string {
            let image = ladder_image(l, n_modes, mapping);
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (w, c) in &partial {
                for (iw, ic) in &image {
                    let (ph, prod) = w.mul_unchecked(iw);
                    next.push((prod, ph.apply(c * ic)));
                }
            }
            partial = next;
        }
        for (w, c) in partial {
            out.add(w, c);
        }
    }
    Ok(out.finish())
}

pub fn jordan_wigner(f: &FermionOp, n_modes: usize) -> Result<SparsePauliOp> {
    map_to_qubits(f, n_modes, Mapping::Jw)
}

pub fn parity_map(f: &FermionOp, n_modes: usize) -> Result<SparsePauliOp> {
    map_to_qubits(f, n_modes, Mapping::Parity)
}

/// Aufbau determinant as a qubit basis state: occupations under
/// Jordan–Wigner, prefix parities under the parity mapping.
pub fn hartree_fock_bitstring(
    fi: &FermionIntegrals,
    ordering: SpinOrdering,
    mapping: Mapping,
) -> Result<Bits> {
    let n = fi.n_orbitals;
    if fi.n_electrons > 2 * n {
        return Err(Error::contract(format!(
            "{} electrons exceed {} modes",
            fi.n_electrons,
            2 * n
        )));
    }
    let mut occ = Bits::zeros(2 * n);
    for p in 0..fi.n_alpha() {
        occ.set(ordering.mode(p, false, n), true);
    }
    for p in 0..fi.n_beta() {
        occ.set(ordering.mode(p, true, n), true);
    }
    Ok(match mapping {
        Mapping::Jw => occ,
        Mapping::Parity => {
            let mut out = Bits::zeros(2 * n);
            let mut parity = false;
            for q in 0..2 * n {
                parity ^= occ.get(q);
                out.set(q, parity);
            }
            out
        }
    })
}
