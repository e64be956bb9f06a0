use num_complex::Complex64;

use super::{FermionOp, Ladder, SpinOrdering};
use crate::error::Result;
use crate::pauli::SparsePauliOp;

/// Default penalty strength μ in Hartree.
pub const DEFAULT_SPIN_PENALTY: f64 = 0.5;

/// Total spin `Ŝ² = Ŝ₋Ŝ₊ + Ŝ_z + Ŝ_z²`, normal ordered.
pub fn s_squared(n_orbitals: usize, ordering: SpinOrdering) -> FermionOp {
    let one = Complex64::new(1.0, 0.0);
    let alpha = |p| ordering.mode(p, false, n_orbitals);
    let beta = |p| ordering.mode(p, true, n_orbitals);

    let mut s_plus = FermionOp::zero();
    let mut s_z = FermionOp::zero();
    for p in 0..n_orbitals {
        s_plus.push(
            one,
            vec![Ladder::create(alpha(p)), Ladder::annihilate(beta(p))],
        );
        s_z.push(
            Complex64::new(0.5, 0.0),
            vec![Ladder::create(alpha(p)), Ladder::annihilate(alpha(p))],
        );
        s_z.push(
            Complex64::new(-0.5, 0.0),
            vec![Ladder::create(beta(p)), Ladder::annihilate(beta(p))],
        );
    }
    let s_minus = s_plus.adjoint();
    s_minus
        .mul(&s_plus)
        .add(&s_z)
        .add(&s_z.mul(&s_z))
        .normal_ordered(1e-14)
}

/// `Ĥ + (μ/2)·Ŝ²`; μ = 0 returns `h` untouched.
pub fn add_spin_penalty(h: &SparsePauliOp, s2: &SparsePauliOp, mu: f64) -> Result<SparsePauliOp> {
    if mu == 0.0 {
        crate::error::check_qubits(h.n_qubits(), s2.n_qubits())?;
        return Ok(h.clone());
    }
    SparsePauliOp::combine(
        h,
        s2,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.5 * mu, 0.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::jordan_wigner;
    use crate::mean_field::basis_expectation;
    use crate::pauli::Bits;

    fn s2_on(occupied: &[usize], n_orbitals: usize) -> f64 {
        let op = jordan_wigner(
            &s_squared(n_orbitals, SpinOrdering::Blocked),
            2 * n_orbitals,
        )
        .unwrap();
        basis_expectation(&op, &Bits::from_indices(2 * n_orbitals, occupied))
    }

    #[test]
    fn determinant_spins() {
        // Blocked ordering on two orbitals: α modes 0,1; β modes 2,3.
        assert!((s2_on(&[0, 2], 2) - 0.0).abs() < 1e-12);
        assert!((s2_on(&[0], 2) - 0.75).abs() < 1e-12);
        assert!((s2_on(&[0, 1], 2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_mu_is_identity() {
        let h = SparsePauliOp::from_labels(2, &[(0.3, "Z0"), (0.2, "X0 X1")]).unwrap();
        let s2 = jordan_wigner(&s_squared(1, SpinOrdering::Blocked), 2).unwrap();
        assert_eq!(add_spin_penalty(&h, &s2, 0.0).unwrap(), h);
        let bad = SparsePauliOp::zero(3);
        assert!(add_spin_penalty(&h, &bad, 0.5).is_err());
    }
}
