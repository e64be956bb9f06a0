use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use qccilc_ffi::*;

fn h2_fcidump() -> CString {
    let path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/h2_sto3g_0.74.fcidump");
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe {
        qcc_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    qcc_string_free(p);
    s
}

#[test]
fn h2_round_trip() {
    unsafe {
        let mut h = ptr::null_mut();
        let mut reference = ptr::null_mut();
        let text = h2_fcidump();
        assert_eq!(
            qcc_operator_from_fcidump(
                text.as_ptr(),
                QccMapping::JordanWigner,
                -1.0,
                &mut h,
                &mut reference
            ),
            QccStatus::Ok
        );
        assert_eq!(qcc_operator_n_qubits(h), 4);
        assert_eq!(qcc_operator_len(h), 15);
        assert_eq!(take_string(reference), "1010");
        assert_eq!(qcc_last_error_message(ptr::null_mut(), 0), 0);

        let mut serialized = ptr::null_mut();
        assert_eq!(qcc_operator_to_string(h, &mut serialized), QccStatus::Ok);
        let serialized = CString::new(take_string(serialized)).unwrap();
        let mut again = ptr::null_mut();
        assert_eq!(
            qcc_operator_parse(serialized.as_ptr(), &mut again),
            QccStatus::Ok
        );
        assert_eq!(qcc_operator_len(again), 15);
        qcc_operator_free(again);

        let mut exact = 0.0;
        assert_eq!(qcc_ground_energy(h, &mut exact), QccStatus::Ok);
        let bits = CString::new("1010").unwrap();
        let mut e_ref = 0.0;
        assert_eq!(
            qcc_basis_energy(h, bits.as_ptr(), &mut e_ref),
            QccStatus::Ok
        );
        assert!(e_ref > exact);

        let mut ansatz = ptr::null_mut();
        let mut e_ilc = 0.0;
        assert_eq!(
            qcc_ilc_optimize(h, bits.as_ptr(), 1, &mut ansatz, &mut e_ilc),
            QccStatus::Ok
        );
        assert_eq!(qcc_ilc_len(ansatz), 1);
        assert!(qcc_ilc_tau(ansatz).is_finite());
        let mut alpha = [0.0; 1];
        assert_eq!(qcc_ilc_alphas(ansatz, alpha.as_mut_ptr(), 1), 1);
        let mut word = ptr::null_mut();
        assert_eq!(qcc_ilc_entangler(ansatz, 0, &mut word), QccStatus::Ok);
        assert!(!take_string(word).is_empty());
        assert!((e_ilc - exact).abs() < 1e-8, "{e_ilc} vs {exact}");

        let mut dressed = ptr::null_mut();
        assert_eq!(
            qcc_dress_ilc(h, ansatz, QccDirection::Inverse, &mut dressed),
            QccStatus::Ok
        );
        let mut e_dressed = 0.0;
        assert_eq!(
            qcc_basis_energy(dressed, bits.as_ptr(), &mut e_dressed),
            QccStatus::Ok
        );
        assert!((e_dressed - e_ilc).abs() < 1e-10);
        let mut exact_dressed = 0.0;
        assert_eq!(
            qcc_ground_energy(dressed, &mut exact_dressed),
            QccStatus::Ok
        );
        assert!((exact_dressed - exact).abs() < 1e-10);

        let mut e_pipe = 0.0;
        let mut final_h = ptr::null_mut();
        assert_eq!(
            qcc_pipeline(h, bits.as_ptr(), 1, 1, 1, &mut e_pipe, &mut final_h),
            QccStatus::Ok
        );
        assert!(e_pipe >= exact - 1e-9 && e_pipe <= e_ref);
        assert_eq!(qcc_operator_n_qubits(final_h), 4);

        qcc_operator_free(final_h);
        qcc_operator_free(dressed);
        qcc_ilc_free(ansatz);
        qcc_operator_free(h);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut h = ptr::null_mut();
        let bad = CString::new("qubits 2\n1.0 0.0 Q0\n").unwrap();
        assert_eq!(qcc_operator_parse(bad.as_ptr(), &mut h), QccStatus::Input);
        assert!(h.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(
            qcc_operator_parse(ptr::null(), &mut h),
            QccStatus::InvalidArgument
        );
        assert!(last_error().contains("text"));

        let good = CString::new("qubits 2\n1.0 0.0 X0 X1\n0.5 0.0 Z0\n").unwrap();
        assert_eq!(qcc_operator_parse(good.as_ptr(), &mut h), QccStatus::Ok);
        let short = CString::new("0").unwrap();
        let mut e = 0.0;
        assert_eq!(
            qcc_basis_energy(h, short.as_ptr(), &mut e),
            QccStatus::Input
        );

        // Truncated copy still reports the full length.
        let full = qcc_last_error_message(ptr::null_mut(), 0);
        let mut tiny = [1 as c_char; 4];
        assert_eq!(qcc_last_error_message(tiny.as_mut_ptr(), tiny.len()), full);
        assert_eq!(tiny[3], 0);
        qcc_operator_free(h);

        assert_eq!(qcc_operator_len(ptr::null()), 0);
        qcc_operator_free(ptr::null_mut());
        qcc_ilc_free(ptr::null_mut());
        qcc_string_free(ptr::null_mut());
    }
}

#[test]
fn growth_factors() {
    assert_eq!(qcc_growth_worst(4), 11.0);
    assert_eq!(qcc_growth_avg(8), 19.0);
    let v = unsafe { CStr::from_ptr(qcc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/qccilc.h")).unwrap();
    for sym in [
        "qcc_operator_parse",
        "qcc_dress_ilc",
        "qcc_pipeline",
        "qcc_last_error_message",
        "QCC_STATUS_INFEASIBLE",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args([
            "-std=c99",
            "-Wall",
            "-Werror",
            "-fsyntax-only",
            "-x",
            "c",
            "-",
        ])
        .arg("-include")
        .arg(dir.join("include/qccilc.h"))
        .stdin(std::process::Stdio::null())
        .status()
    else {
        eprintln!("no C compiler available; skipping syntax check");
        return;
    };
    assert!(status.success());
}
