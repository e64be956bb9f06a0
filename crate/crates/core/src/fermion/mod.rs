//! Second-quantized electronic Hamiltonians and their qubit images.

mod fcidump;
mod mapping;
mod spin;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use fcidump::{parse_fcidump, FermionIntegrals};
pub use mapping::{hartree_fock_bitstring, jordan_wigner, map_to_qubits, parity_map, Mapping};
pub use spin::{add_spin_penalty, s_squared, DEFAULT_SPIN_PENALTY};

use crate::error::{Error, Result};
use crate::pauli::SparsePauliOp;

/// Creation (`dagger`) or annihilation operator on one spin orbital.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }
}

/// How spatial orbital `p` with spin `σ` is assigned a mode index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinOrdering {
    /// All α orbitals, then all β orbitals: `p + σ·n`.
    #[default]
    Blocked,
    /// `2p + σ`.
    Interleaved,
}

impl SpinOrdering {
    pub fn mode(self, orbital: usize, beta: bool, n_orbitals: usize) -> usize {
        match self {
            SpinOrdering::Blocked => orbital + if beta { n_orbitals } else { 0 },
            SpinOrdering::Interleaved => 2 * orbital + beta as usize,
        }
    }
}

impl FromStr for SpinOrdering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blocked" => Ok(SpinOrdering::Blocked),
            "interleaved" => Ok(SpinOrdering::Interleaved),
            _ => Err(Error::parse(0, format!("unknown spin ordering {s:?}"))),
        }
    }
}

impl fmt::Display for SpinOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinOrdering::Blocked => "blocked",
            SpinOrdering::Interleaved => "interleaved",
        })
    }
}

/// Sum of ladder-operator strings.
///
/// Operators built through [`FermionOp::normal_ordered`] keep every string
/// normal ordered: creators left of annihilators, each group in strictly
/// descending mode order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FermionOp {
    terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl FermionOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self {
            terms: vec![(Complex64::new(c, 0.0), Vec::new())],
        }
    }

    pub fn from_raw(terms: Vec<(Complex64, Vec<Ladder>)>) -> Self {
        Self { terms }
    }

    pub fn push(&mut self, coeff: Complex64, string: Vec<Ladder>) {
        self.terms.push((coeff, string));
    }

    pub fn terms(&self) -> &[(Complex64, Vec<Ladder>)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|(_, s)| s.iter().map(|l| l.mode))
            .max()
    }

    pub fn scaled(&self, s: f64) -> FermionOp {
        Self {
            terms: self.terms.iter().map(|(c, o)| (c * s, o.clone())).collect(),
        }
    }

    pub fn add(&self, other: &FermionOp) -> FermionOp {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    /// Product of operators by string concatenation (not normal ordered).
    pub fn mul(&self, other: &FermionOp) -> FermionOp {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (ca, sa) in &self.terms {
            for (cb, sb) in &other.terms {
                let mut s = sa.clone();
                s.extend_from_slice(sb);
                terms.push((ca * cb, s));
            }
        }
        Self { terms }
    }

    pub fn adjoint(&self) -> FermionOp {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(c, s)| {
                    let s = s
                        .iter()
                        .rev()
                        .map(|l| Ladder {
                            mode: l.mode,
                            dagger: !l.dagger,
                        })
                        .collect();
                    (c.conj(), s)
                })
                .collect(),
        }
    }

    /// Normal-ordered, merged form; terms with `|c| < tol` are dropped.
    pub fn normal_ordered(&self, tol: f64) -> FermionOp {
        let mut acc: HashMap<Vec<Ladder>, Complex64> = HashMap::new();
        for (c, s) in &self.terms {
            normal_order_into(*c, s.clone(), &mut acc);
        }
        let mut terms: Vec<_> = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= tol)
            .map(|(s, c)| (c, s))
            .collect();
        terms.sort_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.1.cmp(&b.1)));
        Self { terms }
    }

    /// Hermiticity check through the normal-ordered difference `F − F†`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.add(&self.adjoint().scaled(-1.0))
            .normal_ordered(tol)
            .is_empty()
    }
}

fn normal_order_into(
    coeff: Complex64,
    mut s: Vec<Ladder>,
    acc: &mut HashMap<Vec<Ladder>, Complex64>,
) {
    // Insertion sort toward (creators desc, annihilators desc); each swap
    // flips the sign, and an a_p a†_p swap also spawns the contracted string.
    let mut sign = 1.0;
    let n = s.len();
    for i in 1..n {
        let mut j = i;
        while j > 0 {
            let (left, right) = (s[j - 1], s[j]);
            let must_swap = match (left.dagger, right.dagger) {
                (false, true) => true,
                (true, true) | (false, false) => {
                    if left.mode == right.mode {
                        return;
                    }
                    right.mode > left.mode
                }
                (true, false) => false,
            };
            if !must_swap {
                break;
            }
            if !left.dagger && right.dagger && left.mode == right.mode {
                let mut contracted = s.clone();
                contracted.drain(j - 1..=j);
                normal_order_into(coeff * sign, contracted, acc);
            }
            s.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    *acc.entry(s).or_insert(Complex64::new(0.0, 0.0)) += coeff * sign;
}

/// Qubit image of the electronic Hamiltonian, optionally with the spin
/// penalty `(μ/2)·Ŝ²` added.
pub fn qubit_hamiltonian(
    fi: &FermionIntegrals,
    ordering: SpinOrdering,
    mapping: Mapping,
    spin_penalty: Option<f64>,
) -> Result<SparsePauliOp> {
    let n_modes = 2 * fi.n_orbitals;
    let h = map_to_qubits(&build_fermion_hamiltonian(fi, ordering), n_modes, mapping)?;
    match spin_penalty {
        Some(mu) => {
            let s2 = map_to_qubits(&s_squared(fi.n_orbitals, ordering), n_modes, mapping)?;
            add_spin_penalty(&h, &s2, mu)
        }
        None => Ok(h),
    }
}

/// Spin-summed electronic Hamiltonian
/// `E_core + Σ h_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`.
pub fn build_fermion_hamiltonian(fi: &FermionIntegrals, ordering: SpinOrdering) -> FermionOp {
    let n = fi.n_orbitals;
    let mut raw = FermionOp::constant(fi.core_energy);
    let mode = |p: usize, beta: bool| ordering.mode(p, beta, n);
    for sigma in [false, true] {
        for p in 0..n {
            for q in 0..n {
                let h = fi.h(p, q);
                if h != 0.0 {
                    raw.push(
                        Complex64::new(h, 0.0),
                        vec![
                            Ladder::create(mode(p, sigma)),
                            Ladder::annihilate(mode(q, sigma)),
                        ],
                    );
                }
            }
        }
    }
    for sigma in [false, true] {
        for tau in [false, true] {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            let g = fi.g(p, q, r, s);
                            if g == 0.0 {
                                continue;
                            }
                            let (mp, mq, mr, ms) =
                                (mode(p, sigma), mode(q, sigma), mode(r, tau), mode(s, tau));
                            if mp == mr || mq == ms {
                                continue;
                            }
                            raw.push(
                                Complex64::new(0.5 * g, 0.0),
                                vec![
                                    Ladder::create(mp),
                                    Ladder::create(mr),
                                    Ladder::annihilate(ms),
                                    Ladder::annihilate(mq),
                                ],
                            );
                        }
                    }
                }
            }
        }
    }
    raw.normal_ordered(1e-14)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn anticommutator_contracts() {
        // a_0 a†_0 = 1 − a†_0 a_0
        let op = FermionOp::from_raw(vec![(
            c(1.0),
            vec![Ladder::annihilate(0), Ladder::create(0)],
        )]);
        let no = op.normal_ordered(0.0);
        assert_eq!(no.len(), 2);
        assert!(no.terms().contains(&(c(1.0), vec![])));
        assert!(no
            .terms()
            .contains(&(c(-1.0), vec![Ladder::create(0), Ladder::annihilate(0)])));
    }

    #[test]
    fn pauli_exclusion() {
        let op = FermionOp::from_raw(vec![(c(1.0), vec![Ladder::create(2), Ladder::create(2)])]);
        assert!(op.normal_ordered(0.0).is_empty());
    }

    #[test]
    fn reorder_sign() {
        let op = FermionOp::from_raw(vec![(c(1.0), vec![Ladder::create(0), Ladder::create(1)])]);
        assert_eq!(
            op.normal_ordered(0.0).terms(),
            &[(c(-1.0), vec![Ladder::create(1), Ladder::create(0)])]
        );
    }

    #[test]
    fn one_orbital_hamiltonian() {
        let mut fi = FermionIntegrals::new(1, 1, 1).unwrap();
        fi.set_h(0, 0, -0.5);
        fi.core_energy = 0.25;
        let h = build_fermion_hamiltonian(&fi, SpinOrdering::Blocked);
        assert_eq!(h.len(), 3);
        assert!(h.terms().contains(&(c(0.25), vec![])));
        assert!(h
            .terms()
            .contains(&(c(-0.5), vec![Ladder::create(0), Ladder::annihilate(0)])));
        assert!(h
            .terms()
            .contains(&(c(-0.5), vec![Ladder::create(1), Ladder::annihilate(1)])));
        assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn zero_integrals_give_constant() {
        let mut fi = FermionIntegrals::new(2, 2, 0).unwrap();
        fi.core_energy = 1.5;
        let h = build_fermion_hamiltonian(&fi, SpinOrdering::Interleaved);
        assert_eq!(h.terms(), &[(c(1.5), vec![])]);
    }

    #[test]
    fn orderings() {
        assert_eq!(SpinOrdering::Blocked.mode(1, true, 3), 4);
        assert_eq!(SpinOrdering::Interleaved.mode(1, true, 3), 3);
        assert_eq!(
            "interleaved".parse::<SpinOrdering>().unwrap(),
            SpinOrdering::Interleaved
        );
    }
}
