use std::collections::HashSet;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::anticom::{max_set_size, solve_request, AnticomRequest};
use crate::error::{Error, Result};
use crate::ilc::IlcAnsatz;
use crate::pauli::{Bits, PauliWord, SparsePauliOp};

const MAX_REDRAWS: usize = 100;

fn random_bits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Bits {
    Bits::from_bools(&(0..n).map(|_| rng.gen::<bool>()).collect::<Vec<_>>())
}

fn random_word<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliWord {
    let x = random_bits(n, rng);
    let z = random_bits(n, rng);
    PauliWord::from_bits(x, z).expect("equal lengths")
}

/// `m` distinct uniform words with uniform real coefficients in `[−1, 1]`.
pub fn random_hamiltonian<R: Rng + ?Sized>(
    n_qubits: usize,
    m: usize,
    rng: &mut R,
) -> Result<SparsePauliOp> {
    let available = if n_qubits >= 32 {
        u128::MAX
    } else {
        1u128 << (2 * n_qubits)
    };
    if m as u128 > available {
        return Err(Error::contract(format!(
            "{m} distinct words requested on {n_qubits} qubits"
        )));
    }
    let mut seen = HashSet::with_capacity(m);
    let mut terms = Vec::with_capacity(m);
    while terms.len() < m {
        let w = random_word(n_qubits, rng);
        if seen.insert(w.clone()) {
            // Nonzero draws keep the term count exact after pruning.
            let mut c: f64 = 0.0;
            while c == 0.0 || c.abs() < 1e-6 {
                c = rng.gen_range(-1.0..=1.0);
            }
            terms.push((w, Complex64::new(c, 0.0)));
        }
    }
    SparsePauliOp::from_terms(n_qubits, terms)
}

/// `n` uniform odd-ŷ words with angles uniform in `[0, 2π)`.
pub fn random_qcc_transform<R: Rng + ?Sized>(
    n_qubits: usize,
    n: usize,
    rng: &mut R,
) -> Vec<(PauliWord, f64)> {
    (0..n)
        .map(|_| {
            let w = loop {
                let w = random_word(n_qubits, rng);
                if w.y_parity() {
                    break w;
                }
            };
            (w, rng.gen_range(0.0..TAU))
        })
        .collect()
}

/// Random flip vectors, solved for an anti-commuting odd-ŷ set, with
/// `τ ∈ [0, 2π)` and `α` uniform on the unit sphere.
pub fn random_ilc_transform<R: Rng + ?Sized>(
    n_qubits: usize,
    n: usize,
    rng: &mut R,
) -> Result<IlcAnsatz> {
    if n == 0 || n > max_set_size(n_qubits) {
        return Err(Error::contract(format!(
            "ILC size {n} outside 1..={} for {n_qubits} qubits",
            max_set_size(n_qubits)
        )));
    }
    if n as u128 >= (1u128 << n_qubits.min(127)) {
        return Err(Error::contract("not enough distinct flip vectors"));
    }
    let mut tried = Vec::new();
    for _ in 0..MAX_REDRAWS {
        let mut xs: Vec<Bits> = Vec::with_capacity(n);
        while xs.len() < n {
            let x = random_bits(n_qubits, rng);
            if !x.is_zero() && !xs.contains(&x) {
                xs.push(x);
            }
        }
        let req = AnticomRequest::new(n_qubits, xs.clone())?;
        if let Some(words) = solve_request(&req)? {
            let tau = rng.gen_range(0.0..TAU);
            let mut alphas: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = alphas.iter().map(|a| a * a).sum::<f64>().sqrt();
            alphas.iter_mut().for_each(|a| *a /= norm);
            return IlcAnsatz::new(words, tau, alphas);
        }
        tried.push(
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    Err(Error::Infeasible { tried })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_and_valid() {
        let a = random_ilc_transform(6, 5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = random_ilc_transform(6, 5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        let q = random_qcc_transform(6, 20, &mut ChaCha8Rng::seed_from_u64(2));
        assert!(q
            .iter()
            .all(|(w, t)| w.y_parity() && (0.0..TAU).contains(t)));
        let h = random_hamiltonian(4, 30, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(h.len(), 30);
        assert!(h.is_hermitian(0.0));
    }
}
