//! Dense statevector emulation, used as the numerical oracle for everything
//! built symbolically elsewhere.

mod eigen;
mod qcc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_qubits, Error, Result};
use crate::mean_field::QmfState;
use crate::pauli::{Bits, PauliWord, Phase, SparsePauliOp};

pub use eigen::{eigenvalues, ground_state, GroundState, GroundStateOptions};
pub use qcc::{optimize_qcc, qcc_energy, qcc_state, QccOptions, QccResult};

/// Default largest register a statevector may hold.
pub const DEFAULT_STATE_CAP: usize = 20;

const PAR_DIM: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded {
            what: "statevector",
            requested: n,
            cap,
        })
    } else {
        Ok(())
    }
}

impl Statevector {
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Self::basis(&Bits::zeros(n_qubits))
    }

    pub fn basis(bits: &Bits) -> Result<Self> {
        let n = bits.len();
        check_cap(n, DEFAULT_STATE_CAP)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[bits.to_u64() as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::contract(format!(
                "{} amplitudes is not a power of two",
                amps.len()
            )));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        check_cap(n_qubits, DEFAULT_STATE_CAP)?;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `e^{−i·angle·T/2} = cos(angle/2) − i sin(angle/2)·T`.
    pub fn apply_pauli_exp(&mut self, t: &PauliWord, angle: f64) -> Result<()> {
        check_qubits(self.n_qubits, t.n_qubits())?;
        let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        self.apply_cos_sin(t, c, s);
        Ok(())
    }

    fn apply_cos_sin(&mut self, t: &PauliWord, c: f64, s: f64) {
        let x = t.x_bits().to_u64();
        let z = t.z_bits().to_u64();
        let xz = (x & z).count_ones();
        let src = &self.amps;
        let minus_is = Complex64::new(0.0, -s);
        let row = |r: usize| {
            let b = r as u64 ^ x;
            let ph = Phase::new(xz + 2 * (z & b).count_ones());
            src[r] * c + ph.apply(minus_is * src[b as usize])
        };
        self.amps = if src.len() >= PAR_DIM {
            (0..src.len()).into_par_iter().map(row).collect()
        } else {
            (0..src.len()).map(row).collect()
        };
    }

    /// `ψ ↦ (cos τ − i sin τ Σ α_k T_k) ψ`.
    pub fn apply_ilc(&mut self, ents: &[PauliWord], tau: f64, alphas: &[f64]) -> Result<()> {
        if ents.len() != alphas.len() {
            return Err(Error::contract("entangler and amplitude counts differ"));
        }
        let gen = SparsePauliOp::from_terms_with_threshold(
            self.n_qubits,
            ents.iter()
                .zip(alphas)
                .map(|(t, &a)| (t.clone(), Complex64::new(a, 0.0))),
            0.0,
        )?;
        let a_psi = gen.apply_dense(&self.amps);
        let (c, s) = (tau.cos(), tau.sin());
        for (v, w) in self.amps.iter_mut().zip(a_psi) {
            *v = *v * c + Complex64::new(0.0, -s) * w;
        }
        Ok(())
    }

    /// `⟨ψ|H|ψ⟩`; the imaginary residual must stay below 1e-9.
    pub fn expectation(&self, h: &SparsePauliOp) -> Result<f64> {
        check_qubits(self.n_qubits, h.n_qubits())?;
        let hv = h.apply_dense(&self.amps);
        let e: Complex64 = self.amps.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        if e.im.abs() > 1e-9 {
            return Err(Error::contract(format!(
                "expectation has imaginary part {:.3e}",
                e.im
            )));
        }
        Ok(e.re)
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Statevector) -> Result<Complex64> {
        check_qubits(self.n_qubits, other.n_qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Product state `⊗ (cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩)`.
pub fn prepare_qmf(s: &QmfState) -> Result<Statevector> {
    let n = s.n_qubits();
    check_cap(n, DEFAULT_STATE_CAP)?;
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for q in 0..n {
        let a0 = Complex64::new((s.thetas[q] / 2.0).cos(), 0.0);
        let a1 = Complex64::from_polar((s.thetas[q] / 2.0).sin(), s.phis[q]);
        // Qubit q is bit q of the index, so it doubles the array as the high half.
        let mut next = Vec::with_capacity(amps.len() * 2);
        next.extend(amps.iter().map(|v| v * a0));
        next.extend(amps.iter().map(|v| v * a1));
        amps = next;
    }
    Ok(Statevector { n_qubits: n, amps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn op(n: usize, terms: &[(f64, &str)]) -> SparsePauliOp {
        SparsePauliOp::from_labels(n, terms).unwrap()
    }

    #[test]
    fn qmf_preparation() {
        let v = prepare_qmf(&QmfState {
            thetas: vec![0.0; 3],
            phis: vec![0.0; 3],
        })
        .unwrap();
        assert_eq!(v, Statevector::zero_state(3).unwrap());
        let v = prepare_qmf(&QmfState {
            thetas: vec![PI, 0.0],
            phis: vec![0.0; 2],
        })
        .unwrap();
        assert!((v.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_on_zero() {
        let mut v = Statevector::zero_state(1).unwrap();
        let y = PauliWord::parse(1, "Y0").unwrap();
        v.apply_pauli_exp(&y, 0.7).unwrap();
        assert!((v.amplitudes()[0] - Complex64::new(0.35f64.cos(), 0.0)).norm() < 1e-15);
        assert!((v.amplitudes()[1] - Complex64::new(0.35f64.sin(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn half_angles_compose() {
        let t = PauliWord::parse(3, "X0 Y1 Z2").unwrap();
        let s = QmfState {
            thetas: vec![0.3, 1.2, 2.0],
            phis: vec![0.1, 0.5, 4.0],
        };
        let mut a = prepare_qmf(&s).unwrap();
        let mut b = a.clone();
        a.apply_pauli_exp(&t, 0.4).unwrap();
        a.apply_pauli_exp(&t, 0.4).unwrap();
        b.apply_pauli_exp(&t, 0.8).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn expectation_and_overlap() {
        let v = Statevector::zero_state(2).unwrap();
        assert_eq!(v.expectation(&op(2, &[(1.0, "Z0")])).unwrap(), 1.0);
        assert!((v.overlap(&v).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn matches_mean_field_expectation() {
        let h = op(
            3,
            &[
                (0.7, "X0 Y1"),
                (-0.3, "Z0 Z2"),
                (0.45, "Y0 X1 Z2"),
                (0.2, "I"),
            ],
        );
        let s = QmfState {
            thetas: vec![0.3, 1.1, 2.0],
            phis: vec![4.2, 1.3, 0.2],
        };
        let a = prepare_qmf(&s).unwrap().expectation(&h).unwrap();
        let b = crate::mean_field::qmf_expectation(&h, &s).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            Statevector::zero_state(21),
            Err(Error::CapExceeded { .. })
        ));
    }
}
