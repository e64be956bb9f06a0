use std::path::{Path, PathBuf};

use qccilc::fermion::{
    hartree_fock_bitstring, parse_fcidump, qubit_hamiltonian, Mapping, SpinOrdering,
};
use qccilc::mean_field::basis_expectation;
use qccilc::pauli::text;
use qccilc::sim::eigenvalues;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// `(file, CASCI energy)` pairs computed when the fixtures were exported.
fn references() -> Vec<(String, f64)> {
    std::fs::read_to_string(fixture_dir().join("casci_reference.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (name, e) = l.split_once(' ').unwrap();
            (name.to_string(), e.trim().parse().unwrap())
        })
        .collect()
}

#[test]
fn h2_golden_hamiltonian() {
    let fi = parse_fcidump(
        &std::fs::read_to_string(fixture_dir().join("h2_sto3g_0.74.fcidump")).unwrap(),
    )
    .unwrap();
    let h = qubit_hamiltonian(&fi, SpinOrdering::Blocked, Mapping::Jw, None).unwrap();
    assert_eq!((h.n_qubits(), h.len()), (4, 15));
    assert!(h.iter().all(|(_, c)| c.im == 0.0));
    let hf = hartree_fock_bitstring(&fi, SpinOrdering::Blocked, Mapping::Jw).unwrap();
    assert_eq!(hf.to_string(), "1010");
    // Serialization is exact, so a second pass is byte-identical.
    let once = text::serialize(&h);
    assert_eq!(text::serialize(&text::parse(&once).unwrap()), once);
}

#[test]
fn term_counts_per_molecule() {
    for (file, nq, terms) in [
        ("h2_sto3g_0.74.fcidump", 4, 15),
        ("lih_sto3g_cas2e3o_1.6.fcidump", 6, 62),
        ("h2o_631g_cas4e4o_2.35.fcidump", 8, 185),
    ] {
        let fi =
            parse_fcidump(&std::fs::read_to_string(fixture_dir().join(file)).unwrap()).unwrap();
        let h = qubit_hamiltonian(&fi, SpinOrdering::Blocked, Mapping::Jw, None).unwrap();
        assert_eq!((h.n_qubits(), h.len()), (nq, terms), "{file}");
    }
}

#[test]
fn casci_energy_is_in_every_spectrum() {
    for (file, casci) in references() {
        let fi =
            parse_fcidump(&std::fs::read_to_string(fixture_dir().join(&file)).unwrap()).unwrap();
        for mapping in [Mapping::Jw, Mapping::Parity] {
            let h = qubit_hamiltonian(&fi, SpinOrdering::Blocked, mapping, None).unwrap();
            let spectrum = eigenvalues(&h).unwrap();
            let closest = spectrum
                .iter()
                .map(|e| (e - casci).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(
                closest < 1e-8,
                "{file} {mapping:?}: nearest eigenvalue {closest:.2e} away"
            );
            let hf = hartree_fock_bitstring(&fi, SpinOrdering::Blocked, mapping).unwrap();
            assert!(
                basis_expectation(&h, &hf) >= casci - 1e-10,
                "{file}: HF below CASCI"
            );
        }
    }
}

#[test]
fn fcidump_round_trip() {
    for (file, _) in references() {
        let fi =
            parse_fcidump(&std::fs::read_to_string(fixture_dir().join(&file)).unwrap()).unwrap();
        let again = parse_fcidump(&fi.to_fcidump()).unwrap();
        let a = qubit_hamiltonian(&fi, SpinOrdering::Blocked, Mapping::Jw, None).unwrap();
        let b = qubit_hamiltonian(&again, SpinOrdering::Blocked, Mapping::Jw, None).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12, "{file}");
    }
}
