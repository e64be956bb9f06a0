use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Bits, PauliWord, Phase};
use crate::error::{check_qubits, Error, Result};

/// Coefficients with magnitude below this are dropped after every merge.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-8;

/// Term count above which word-level maps run on the rayon pool.
const PAR_TERMS: usize = 4096;

/// Linear combination of Pauli words with complex coefficients.
///
/// Terms are unique, stored in canonical `(x, z)` order, and never below the
/// prune threshold. Values are immutable once built; every operation returns
/// a new operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePauliOp {
    n_qubits: usize,
    threshold: f64,
    terms: Vec<(PauliWord, Complex64)>,
}

/// Accumulates `(word, coefficient)` contributions and finishes with one prune pass.
#[derive(Debug)]
pub struct OpBuilder {
    n_qubits: usize,
    threshold: f64,
    acc: HashMap<PauliWord, Complex64>,
}

impl OpBuilder {
    pub fn new(n_qubits: usize, threshold: f64) -> Self {
        Self {
            n_qubits,
            threshold,
            acc: HashMap::new(),
        }
    }

    pub fn with_capacity(n_qubits: usize, threshold: f64, capacity: usize) -> Self {
        Self {
            n_qubits,
            threshold,
            acc: HashMap::with_capacity(capacity),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn add(&mut self, word: PauliWord, coeff: Complex64) {
        debug_assert_eq!(word.n_qubits(), self.n_qubits);
        *self.acc.entry(word).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    pub fn add_op(&mut self, op: &SparsePauliOp, scale: Complex64) {
        for (w, c) in op.iter() {
            self.add(w.clone(), scale * c);
        }
    }

    pub fn finish(self) -> SparsePauliOp {
        let threshold = self.threshold;
        let mut terms: Vec<_> = self
            .acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= threshold)
            .collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        SparsePauliOp {
            n_qubits: self.n_qubits,
            threshold,
            terms,
        }
    }
}

impl SparsePauliOp {
    pub fn zero(n_qubits: usize) -> Self {
        Self::zero_with_threshold(n_qubits, DEFAULT_PRUNE_THRESHOLD)
    }

    pub fn zero_with_threshold(n_qubits: usize, threshold: f64) -> Self {
        Self {
            n_qubits,
            threshold,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: Complex64) -> Self {
        Self::from_terms(n_qubits, [(PauliWord::identity(n_qubits), coeff)])
            .expect("identity has matching size")
    }

    /// Merges duplicates and prunes with the default threshold.
    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (PauliWord, Complex64)>,
    ) -> Result<Self> {
        Self::from_terms_with_threshold(n_qubits, terms, DEFAULT_PRUNE_THRESHOLD)
    }

    pub fn from_terms_with_threshold(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (PauliWord, Complex64)>,
        threshold: f64,
    ) -> Result<Self> {
        let mut b = OpBuilder::new(n_qubits, threshold);
        for (w, c) in terms {
            check_qubits(n_qubits, w.n_qubits())?;
            b.add(w, c);
        }
        Ok(b.finish())
    }

    /// Real-coefficient convenience constructor from labels like `"X0 Z2"`.
    pub fn from_labels(n_qubits: usize, terms: &[(f64, &str)]) -> Result<Self> {
        let words = terms
            .iter()
            .map(|&(c, label)| Ok((PauliWord::parse(n_qubits, label)?, Complex64::new(c, 0.0))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n_qubits, words)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.terms.retain(|(_, c)| c.norm() >= threshold);
        self
    }

    pub fn builder(&self) -> OpBuilder {
        OpBuilder::new(self.n_qubits, self.threshold)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&PauliWord, Complex64)> + '_ {
        self.terms.iter().map(|(w, c)| (w, *c))
    }

    pub fn terms(&self) -> &[(PauliWord, Complex64)] {
        &self.terms
    }

    pub fn coeff(&self, word: &PauliWord) -> Complex64 {
        self.terms
            .binary_search_by(|(w, _)| w.cmp(word))
            .map_or(Complex64::new(0.0, 0.0), |i| self.terms[i].1)
    }

    /// Every coefficient real within `tol` (Pauli words are Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(_, c)| c.im.abs() <= tol)
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        match self.terms.iter().find(|(_, c)| c.im.abs() > tol) {
            None => Ok(()),
            Some((w, c)) => Err(Error::contract(format!(
                "operator is not Hermitian: coefficient of {w} has imaginary part {:.3e}",
                c.im
            ))),
        }
    }

    /// Drops imaginary parts (after a Hermiticity check by the caller).
    pub fn real_part(&self) -> SparsePauliOp {
        let mut b = self.builder();
        for (w, c) in self.iter() {
            b.add(w.clone(), Complex64::new(c.re, 0.0));
        }
        b.finish()
    }

    pub fn scaled(&self, s: Complex64) -> SparsePauliOp {
        let mut b = self.builder();
        b.add_op(self, s);
        b.finish()
    }

    /// `scale_a·a + scale_b·b`, merged and pruned with `a`'s threshold.
    pub fn combine(
        a: &SparsePauliOp,
        b: &SparsePauliOp,
        scale_a: Complex64,
        scale_b: Complex64,
    ) -> Result<Self> {
        check_qubits(a.n_qubits, b.n_qubits)?;
        let mut out = OpBuilder::with_capacity(a.n_qubits, a.threshold, a.len() + b.len());
        out.add_op(a, scale_a);
        out.add_op(b, scale_b);
        Ok(out.finish())
    }

    pub fn add(&self, other: &SparsePauliOp) -> Result<Self> {
        Self::combine(
            self,
            other,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    /// Applies `f` to each term, in parallel for large operators, and returns
    /// the contributions in term order so merging stays deterministic.
    pub(crate) fn map_terms<F>(&self, f: F) -> Vec<(PauliWord, Complex64)>
    where
        F: Fn(&PauliWord, Complex64) -> Option<(PauliWord, Complex64)> + Sync + Send,
    {
        if self.terms.len() >= PAR_TERMS {
            self.terms
                .par_iter()
                .filter_map(|(w, c)| f(w, *c))
                .collect()
        } else {
            self.terms.iter().filter_map(|(w, c)| f(w, *c)).collect()
        }
    }

    /// `[self, t]`: only words anticommuting with `t` survive, as `2·c·(P·t)`.
    pub fn commutator(&self, t: &PauliWord) -> Result<SparsePauliOp> {
        check_qubits(self.n_qubits, t.n_qubits())?;
        let mut b = OpBuilder::with_capacity(self.n_qubits, self.threshold, self.len());
        for (w, c) in self.map_terms(|w, c| {
            if w.commutes_unchecked(t) {
                None
            } else {
                let (ph, p) = w.mul_unchecked(t);
                Some((p, ph.apply(c * 2.0)))
            }
        }) {
            b.add(w, c);
        }
        Ok(b.finish())
    }

    /// `t1 · self · t2` with phases folded into coefficients.
    pub fn sandwich(t1: &PauliWord, h: &SparsePauliOp, t2: &PauliWord) -> Result<SparsePauliOp> {
        check_qubits(h.n_qubits, t1.n_qubits())?;
        check_qubits(h.n_qubits, t2.n_qubits())?;
        let mut b = OpBuilder::with_capacity(h.n_qubits, h.threshold, h.len());
        for (w, c) in h.map_terms(|w, c| {
            let (p1, left) = t1.mul_unchecked(w);
            let (p2, word) = left.mul_unchecked(t2);
            Some((word, (p1 * p2).apply(c)))
        }) {
            b.add(w, c);
        }
        Ok(b.finish())
    }

    /// Operator product `self · other`.
    pub fn mul_op(&self, other: &SparsePauliOp) -> Result<SparsePauliOp> {
        check_qubits(self.n_qubits, other.n_qubits)?;
        let mut b = OpBuilder::new(self.n_qubits, self.threshold);
        for (wa, ca) in self.iter() {
            for (wb, cb) in other.iter() {
                let (ph, w) = wa.mul_unchecked(wb);
                b.add(w, ph.apply(ca * cb));
            }
        }
        Ok(b.finish())
    }

    /// Distinct nonzero x-vectors among the terms, in ascending order.
    pub fn distinct_x_vectors(&self) -> Vec<Bits> {
        let mut xs: Vec<Bits> = self
            .terms
            .iter()
            .map(|(w, _)| w.x_bits().clone())
            .filter(|x| !x.is_zero())
            .collect();
        xs.sort_unstable();
        xs.dedup();
        xs
    }

    /// `self·ψ` on a dense statevector (qubit `q` ↦ bit `q` of the index).
    pub fn apply_dense(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let dim = psi.len();
        debug_assert_eq!(dim, 1usize << self.n_qubits);
        let words: Vec<(u64, u64, u32, Complex64)> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let x = w.x_bits().to_u64();
                let z = w.z_bits().to_u64();
                (x, z, (x & z).count_ones(), *c)
            })
            .collect();
        let row = |out_idx: usize| -> Complex64 {
            // (P ψ)[r] = Σ_b ⟨r|P|b⟩ψ[b] with b = r ⊕ x.
            let r = out_idx as u64;
            let mut acc = Complex64::new(0.0, 0.0);
            for &(x, z, xz, c) in &words {
                let b = r ^ x;
                let k = xz + 2 * (z & b).count_ones();
                acc += Phase::new(k).apply(c * psi[b as usize]);
            }
            acc
        };
        if dim * words.len() >= 1 << 16 {
            (0..dim).into_par_iter().map(row).collect()
        } else {
            (0..dim).map(row).collect()
        }
    }

    /// Dense matrix, row-major.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.n_qubits;
        assert!(n <= 14, "dense matrix requested for {n} qubits");
        let dim = 1usize << n;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (w, c) in self.iter() {
            for col in 0..dim as u64 {
                let (ph, row) = w.apply_to_index(col);
                m[row as usize * dim + col as usize] += ph.apply(c);
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &SparsePauliOp) -> f64 {
        let mut d: f64 = 0.0;
        for (w, c) in self.iter() {
            d = d.max((c - other.coeff(w)).norm());
        }
        for (w, c) in other.iter() {
            d = d.max((c - self.coeff(w)).norm());
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn op(n: usize, terms: &[(f64, &str)]) -> SparsePauliOp {
        SparsePauliOp::from_labels(n, terms).unwrap()
    }

    #[test]
    fn combine_cancels() {
        let h = op(2, &[(0.3, "X0 X1"), (-1.2, "Z0")]);
        let z = SparsePauliOp::combine(&h, &h, c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!(z.is_empty());
    }

    #[test]
    fn combine_keeps_dominant_term() {
        let a = op(1, &[(1.0, "X0")]);
        let b = op(1, &[(1e-12, "X0")]).with_threshold(0.0);
        let s = SparsePauliOp::combine(&a, &b, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.coeff(&PauliWord::parse(1, "X0").unwrap()) - c(1.0, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn combine_disjoint() {
        let s = op(1, &[(0.5, "X0")]).add(&op(1, &[(0.5, "Z0")])).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn commutator_examples() {
        let y = PauliWord::parse(1, "Y0").unwrap();
        let r = op(1, &[(1.0, "X0")]).commutator(&y).unwrap();
        assert_eq!(
            r.terms(),
            &[(PauliWord::parse(1, "Z0").unwrap(), c(0.0, 2.0))]
        );

        let zz = PauliWord::parse(2, "Z0 Z1").unwrap();
        assert!(op(2, &[(1.0, "Z0")]).commutator(&zz).unwrap().is_empty());

        let r = op(1, &[(1.0, "X0"), (1.0, "Z0")]).commutator(&y).unwrap();
        assert_eq!(r.coeff(&PauliWord::parse(1, "Z0").unwrap()), c(0.0, 2.0));
        assert_eq!(r.coeff(&PauliWord::parse(1, "X0").unwrap()), c(0.0, -2.0));
    }

    #[test]
    fn sandwich_examples() {
        let y = PauliWord::parse(1, "Y0").unwrap();
        let x = PauliWord::parse(1, "X0").unwrap();
        let r = SparsePauliOp::sandwich(&y, &op(1, &[(1.0, "X0")]), &y).unwrap();
        assert_eq!(r.terms(), &[(x.clone(), c(-1.0, 0.0))]);

        let t = PauliWord::parse(3, "X0 Y1 Z2").unwrap();
        let id = SparsePauliOp::identity(3, c(0.7, 0.0));
        assert_eq!(SparsePauliOp::sandwich(&t, &id, &t).unwrap(), id);

        let r = SparsePauliOp::sandwich(&x, &op(1, &[(1.0, "Z0")]), &y).unwrap();
        assert_eq!(r.terms(), &[(PauliWord::identity(1), c(0.0, -1.0))]);
    }

    #[test]
    fn dimension_errors() {
        let a = op(1, &[(1.0, "X0")]);
        let b = op(2, &[(1.0, "X1")]);
        assert!(SparsePauliOp::combine(&a, &b, c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(a.commutator(&PauliWord::identity(2)).is_err());
    }

    #[test]
    fn apply_dense_matches_matrix() {
        let h = op(
            3,
            &[(0.4, "X0 Y2"), (-0.7, "Z1"), (0.25, "Y0 Y1 X2"), (1.1, "I")],
        );
        let m = h.to_dense();
        let psi: Vec<Complex64> = (0..8)
            .map(|k| c(k as f64 * 0.1, 1.0 - k as f64 * 0.05))
            .collect();
        let fast = h.apply_dense(&psi);
        for r in 0..8 {
            let slow: Complex64 = (0..8).map(|k| m[r * 8 + k] * psi[k]).sum();
            assert!((slow - fast[r]).norm() < 1e-14);
        }
    }
}
