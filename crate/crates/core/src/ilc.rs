//! Involutory linear combinations of anti-commuting entanglers and the
//! linear variational problem that fixes their amplitudes.
//!
//! With `A = Σ α_k T_k` and `A² = 1`, `e^{−iτA}|ref⟩ = cos τ|ref⟩ − i sin τ A|ref⟩`,
//! so the energy is a quadratic form in `c = (cos τ, sin τ·α)` over the basis
//! `{|ref⟩, T_1|ref⟩, …}`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::anticom::verify_set;
use crate::dressing::{dress_ilc, Direction};
use crate::error::{check_qubits, Error, Result};
use crate::mean_field::{self, QmfOptions, QmfState};
use crate::pauli::{Bits, PauliWord, SparsePauliOp};

const NORM_TOL: f64 = 1e-12;
const SIN_GUARD: f64 = 1e-10;
const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IlcAnsatz {
    entanglers: Vec<PauliWord>,
    tau: f64,
    alphas: Vec<f64>,
}

impl IlcAnsatz {
    /// Validates anti-commutation, odd ŷ-count and `Σα² = 1`. An empty
    /// entangler list is the identity and requires `τ = 0`.
    pub fn new(entanglers: Vec<PauliWord>, tau: f64, alphas: Vec<f64>) -> Result<Self> {
        if entanglers.len() != alphas.len() {
            return Err(Error::contract(format!(
                "{} entanglers but {} amplitudes",
                entanglers.len(),
                alphas.len()
            )));
        }
        if entanglers.is_empty() {
            if tau != 0.0 {
                return Err(Error::contract("an empty combination needs τ = 0"));
            }
        } else {
            let n = entanglers[0].n_qubits();
            for t in &entanglers {
                check_qubits(n, t.n_qubits())?;
            }
            verify_set(&entanglers)?;
            let norm: f64 = alphas.iter().map(|a| a * a).sum();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::contract(format!("Σα² = {norm}, expected 1")));
            }
        }
        Ok(Self {
            entanglers,
            tau,
            alphas,
        })
    }

    pub fn identity() -> Self {
        Self {
            entanglers: Vec::new(),
            tau: 0.0,
            alphas: Vec::new(),
        }
    }

    pub fn entanglers(&self) -> &[PauliWord] {
        &self.entanglers
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.entanglers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entanglers.is_empty()
    }
}

/// State the subspace is built on.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Basis(Bits),
    Qmf(QmfState),
}

impl Reference {
    pub fn n_qubits(&self) -> usize {
        match self {
            Reference::Basis(b) => b.len(),
            Reference::Qmf(s) => s.n_qubits(),
        }
    }

    pub fn to_qmf(&self) -> QmfState {
        match self {
            Reference::Basis(b) => QmfState::from_basis(b),
            Reference::Qmf(s) => s.clone(),
        }
    }

    pub fn nearest_basis(&self) -> Bits {
        match self {
            Reference::Basis(b) => b.clone(),
            Reference::Qmf(s) => mean_field::nearest_basis_state(s),
        }
    }

    /// `⟨ref|P|ref⟩`, exact for basis states.
    fn word_expectation(&self, w: &PauliWord) -> f64 {
        match self {
            Reference::Basis(b) => {
                if !w.is_diagonal() {
                    0.0
                } else if w.z_bits().dot(b) {
                    -1.0
                } else {
                    1.0
                }
            }
            Reference::Qmf(s) => mean_field::word_expectation(w, s),
        }
    }

    pub fn energy(&self, h: &SparsePauliOp) -> Result<f64> {
        check_qubits(h.n_qubits(), self.n_qubits())?;
        h.ensure_hermitian(1e-10)?;
        Ok(h.iter().map(|(w, c)| c.re * self.word_expectation(w)).sum())
    }
}

#[derive(Clone, Debug)]
pub struct SubspaceProblem {
    /// Masked Hamiltonian matrix.
    pub hbar: DMatrix<Complex64>,
    /// Masked overlap matrix.
    pub sbar: DMatrix<Complex64>,
    pub reference: Reference,
    pub entanglers: Vec<PauliWord>,
}

/// Basis `{|ref⟩, T_1|ref⟩, …, T_N|ref⟩}`; `H_ij = ⟨Φ_i|H|Φ_j⟩` and
/// `S_ij = ⟨Φ_i|Φ_j⟩`, both multiplied elementwise by the phase mask
/// `M = [[1, −i…], [i…, 1…]]`.
pub fn build_subspace(
    h: &SparsePauliOp,
    reference: &Reference,
    ents: &[PauliWord],
) -> Result<SubspaceProblem> {
    h.ensure_hermitian(1e-10)?;
    check_qubits(h.n_qubits(), reference.n_qubits())?;
    for t in ents {
        check_qubits(h.n_qubits(), t.n_qubits())?;
    }
    verify_set(ents)?;
    let n = h.n_qubits();
    let dim = ents.len() + 1;
    let basis: Vec<PauliWord> = std::iter::once(PauliWord::identity(n))
        .chain(ents.iter().cloned())
        .collect();
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|i| (i..dim).map(move |j| (i, j)))
        .collect();
    let entries: Vec<(Complex64, Complex64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ti, tj) = (&basis[i], &basis[j]);
            let mut hv = Complex64::new(0.0, 0.0);
            for (p, c) in h.iter() {
                let (p1, left) = ti.mul_unchecked(p);
                let (p2, w) = left.mul_unchecked(tj);
                let e = reference.word_expectation(&w);
                if e != 0.0 {
                    hv += (p1 * p2).apply(c) * e;
                }
            }
            let (ps, w) = ti.mul_unchecked(tj);
            let sv = ps.apply(Complex64::new(reference.word_expectation(&w), 0.0));
            (hv, sv)
        })
        .collect();
    let mask = |i: usize, j: usize| match (i == 0, j == 0) {
        (true, false) => Complex64::new(0.0, -1.0),
        (false, true) => Complex64::new(0.0, 1.0),
        _ => Complex64::new(1.0, 0.0),
    };
    let mut hbar = DMatrix::zeros(dim, dim);
    let mut sbar = DMatrix::zeros(dim, dim);
    for (&(i, j), &(hv, sv)) in pairs.iter().zip(&entries) {
        hbar[(i, j)] = mask(i, j) * hv;
        sbar[(i, j)] = mask(i, j) * sv;
        hbar[(j, i)] = mask(j, i) * hv.conj();
        sbar[(j, i)] = mask(j, i) * sv.conj();
    }
    Ok(SubspaceProblem {
        hbar,
        sbar,
        reference: reference.clone(),
        entanglers: ents.to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceSolution {
    pub energy: f64,
    /// Real coefficients with `cᵀ Re(S̄) c = 1`.
    pub c: Vec<f64>,
    /// Overlap directions dropped by canonical orthogonalization.
    pub dropped: usize,
}

/// Lowest root of `H̄c = E S̄c` over real `c`.
///
/// Only real `c` correspond to a unitary `e^{−iτA}`, and for real `c` the
/// quadratic forms only see `Re(H̄)` and `Re(S̄)`.
pub fn solve_ground(p: &SubspaceProblem) -> Result<SubspaceSolution> {
    let a = p.hbar.map(|z| z.re);
    let b = p.sbar.map(|z| z.re);
    let dim = a.nrows();
    let seig = SymmetricEigen::new(b.clone());
    let smax = seig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v));
    if smax <= 0.0 {
        return Err(Error::contract("overlap matrix is not positive definite"));
    }
    let keep: Vec<usize> = (0..dim)
        .filter(|&k| seig.eigenvalues[k] > smax / MAX_CONDITION)
        .collect();
    let dropped = dim - keep.len();
    if dropped > 0 {
        log::warn!("overlap matrix ill-conditioned: solving in a reduced subspace ({dropped} directions dropped)");
    }
    let mut x = DMatrix::<f64>::zeros(dim, keep.len());
    for (col, &k) in keep.iter().enumerate() {
        let scale = 1.0 / seig.eigenvalues[k].sqrt();
        for r in 0..dim {
            x[(r, col)] = seig.eigenvectors[(r, k)] * scale;
        }
    }
    let reduced = x.transpose() * &a * &x;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let eig = SymmetricEigen::new(reduced);
    let emin = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let mut best: Option<Vec<f64>> = None;
    for k in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[k] - emin > 1e-10 {
            continue;
        }
        let y = eig.eigenvectors.column(k);
        let mut c: Vec<f64> = (&x * y).iter().copied().collect();
        let nrm = DMatrix::from_column_slice(dim, 1, &c);
        let nn = (nrm.transpose() * &b * &nrm)[(0, 0)].sqrt();
        c.iter_mut().for_each(|v| *v /= nn);
        if let Some(first) = c.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                c.iter_mut().for_each(|v| *v = -*v);
            }
        }
        // Degenerate roots: largest |c| lexicographically, for determinism.
        let better = match &best {
            None => true,
            Some(prev) => c
                .iter()
                .zip(prev)
                .map(|(a, b)| a.abs().total_cmp(&b.abs()))
                .find(|o| o.is_ne())
                .is_some_and(|o| o.is_gt()),
        };
        if better {
            best = Some(c);
        }
    }
    let c = best.expect("at least one root");
    let cv = DMatrix::from_column_slice(dim, 1, &c);
    let energy = (cv.transpose() * &a * &cv)[(0, 0)];
    Ok(SubspaceSolution { energy, c, dropped })
}

/// `τ = arccos c₁`, `α = c_{2…}/sin τ`, renormalized.
pub fn extract_parameters(c: &[f64]) -> Result<(f64, Vec<f64>)> {
    let c1 = c
        .first()
        .copied()
        .ok_or_else(|| Error::contract("empty coefficient vector"))?;
    if c1.abs() > 1.0 + 1e-12 {
        return Err(Error::contract(format!("|c₁| = {} exceeds 1", c1.abs())));
    }
    let tau = c1.clamp(-1.0, 1.0).acos();
    let s = tau.sin();
    if s.abs() < SIN_GUARD {
        return Err(Error::ReferenceDominated(s.abs()));
    }
    let mut alphas: Vec<f64> = c[1..].iter().map(|v| v / s).collect();
    let norm = alphas.iter().map(|a| a * a).sum::<f64>().sqrt();
    alphas.iter_mut().for_each(|a| *a /= norm);
    Ok((tau, alphas))
}

#[derive(Clone, Debug)]
pub struct IlcOptions {
    pub relax_qmf: bool,
    pub max_outer: usize,
    /// Outer-loop energy tolerance (Hartree).
    pub tolerance: f64,
    pub qmf: QmfOptions,
}

impl Default for IlcOptions {
    fn default() -> Self {
        Self {
            relax_qmf: false,
            max_outer: 200,
            tolerance: 1e-9,
            qmf: QmfOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IlcResult {
    pub ansatz: IlcAnsatz,
    pub energy: f64,
    pub reference: Reference,
    pub reference_energy: f64,
    /// Outer iterations performed (1 without relaxation).
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

fn solve_at(
    h: &SparsePauliOp,
    reference: &Reference,
    ents: &[PauliWord],
) -> Result<(IlcAnsatz, f64)> {
    let p = build_subspace(h, reference, ents)?;
    let sol = solve_ground(&p)?;
    let (tau, alphas) = extract_parameters(&sol.c)?;
    Ok((IlcAnsatz::new(ents.to_vec(), tau, alphas)?, sol.energy))
}

/// Optimal amplitudes for fixed entanglers, optionally alternating with
/// Bloch-angle relaxation of the reference on the dressed Hamiltonian.
pub fn optimize_ilc(
    h: &SparsePauliOp,
    reference: &Reference,
    ents: &[PauliWord],
    opts: &IlcOptions,
) -> Result<IlcResult> {
    let reference_energy = reference.energy(h)?;
    if ents.is_empty() {
        return Ok(IlcResult {
            ansatz: IlcAnsatz::identity(),
            energy: reference_energy,
            reference: reference.clone(),
            reference_energy,
            iterations: 0,
            converged: true,
            history: vec![reference_energy],
        });
    }
    let (mut ansatz, mut energy) = solve_at(h, reference, ents)?;
    let mut current = reference.clone();
    let mut history = vec![energy];
    let mut iterations = 1;
    let mut converged = !opts.relax_qmf;
    if opts.relax_qmf {
        while iterations < opts.max_outer {
            let dressed = dress_ilc(h, &ansatz, Direction::Inverse)?;
            let relaxed = mean_field::optimize_qmf(&dressed, &current.to_qmf(), &opts.qmf)?;
            let next_ref = Reference::Qmf(relaxed.state);
            let (next_ansatz, next_energy) = solve_at(h, &next_ref, ents)?;
            iterations += 1;
            if next_energy > energy + 1e-10 {
                log::warn!(
                    "relaxation step raised the energy by {:.3e}; keeping the previous point",
                    next_energy - energy
                );
                converged = true;
                break;
            }
            let delta = energy - next_energy;
            ansatz = next_ansatz;
            energy = next_energy;
            current = next_ref;
            history.push(energy);
            if delta.abs() < opts.tolerance {
                converged = true;
                break;
            }
        }
        if !converged {
            log::warn!(
                "ILC relaxation did not converge within {} outer iterations",
                opts.max_outer
            );
        }
    }
    Ok(IlcResult {
        ansatz,
        energy,
        reference: current,
        reference_energy,
        iterations,
        converged,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_8, SQRT_2};

    fn op(n: usize, terms: &[(f64, &str)]) -> SparsePauliOp {
        SparsePauliOp::from_labels(n, terms).unwrap()
    }

    #[test]
    fn single_qubit_subspace() {
        let h = op(1, &[(1.0, "X0"), (1.0, "Z0")]);
        let y = vec![PauliWord::parse(1, "Y0").unwrap()];
        let p = build_subspace(&h, &Reference::Basis(Bits::zeros(1)), &y).unwrap();
        let expect = [[1.0, 1.0], [1.0, -1.0]];
        for (i, row) in expect.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert!((p.hbar[(i, j)] - Complex64::new(e, 0.0)).norm() < 1e-15);
                let s = if i == j { 1.0 } else { 0.0 };
                assert!((p.sbar[(i, j)] - Complex64::new(s, 0.0)).norm() < 1e-15);
            }
        }
        let sol = solve_ground(&p).unwrap();
        assert!((sol.energy + SQRT_2).abs() < 1e-12);
        let (tau, alphas) = extract_parameters(&sol.c).unwrap();
        assert!((tau - 3.0 * FRAC_PI_8).abs() < 1e-12);
        assert!((alphas[0].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_set() {
        let h = op(2, &[(0.5, "Z0"), (0.25, "X0 X1")]);
        let r = optimize_ilc(
            &h,
            &Reference::Basis(Bits::zeros(2)),
            &[],
            &IlcOptions::default(),
        )
        .unwrap();
        assert_eq!(r.energy, 0.5);
        let p = build_subspace(&h, &Reference::Basis(Bits::zeros(2)), &[]).unwrap();
        assert_eq!(p.hbar.nrows(), 1);
        assert_eq!(solve_ground(&p).unwrap().energy, 0.5);
    }

    #[test]
    fn extraction() {
        assert!(matches!(
            extract_parameters(&[1.0, 0.0]),
            Err(Error::ReferenceDominated(_))
        ));
        let (tau, a) = extract_parameters(&[0.3f64.cos(), 0.3f64.sin()]).unwrap();
        assert!((tau - 0.3).abs() < 1e-14 && (a[0] - 1.0).abs() < 1e-15);
        let t = 1.1f64;
        let (tau, a) = extract_parameters(&[t.cos(), t.sin() * 0.6, t.sin() * 0.8]).unwrap();
        assert!((tau - t).abs() < 1e-14);
        assert!((a[0] - 0.6).abs() < 1e-14 && (a[1] - 0.8).abs() < 1e-14);
    }

    #[test]
    fn ansatz_contract() {
        let t = |s: &str| PauliWord::parse(2, s).unwrap();
        assert!(IlcAnsatz::new(vec![t("Y0"), t("Y0 X1")], 0.1, vec![0.6, 0.8]).is_err());
        assert!(IlcAnsatz::new(vec![t("Y0")], 0.1, vec![0.5]).is_err());
        assert!(IlcAnsatz::new(vec![t("Y0"), t("X0 Y1")], 0.1, vec![0.6, 0.8]).is_ok());
    }

    #[test]
    fn relaxation_lowers_energy() {
        let h = op(
            2,
            &[
                (0.3, "Z0"),
                (0.2, "Z1"),
                (0.5, "X0 X1"),
                (0.3, "X0"),
                (0.1, "Z0 Z1"),
            ],
        );
        let ents = vec![PauliWord::parse(2, "Y0 X1").unwrap()];
        let base = optimize_ilc(
            &h,
            &Reference::Basis(Bits::zeros(2)),
            &ents,
            &IlcOptions::default(),
        )
        .unwrap();
        let relaxed = optimize_ilc(
            &h,
            &Reference::Basis(Bits::zeros(2)),
            &ents,
            &IlcOptions {
                relax_qmf: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(relaxed.energy <= base.energy + 1e-10);
        assert!(relaxed.history.windows(2).all(|w| w[1] <= w[0] + 1e-10));
        assert!(relaxed.converged);
    }
}
