use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;

use super::Bits;
use crate::error::{check_qubits, Error, Result};

/// A power of the imaginary unit, `i^k` with `k` in `0..4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn new(exponent: u32) -> Self {
        Phase((exponent % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// `c · i^k` without floating-point multiplication.
    #[inline]
    pub fn apply(self, c: Complex64) -> Complex64 {
        match self.0 {
            0 => c,
            1 => Complex64::new(-c.im, c.re),
            2 => -c,
            _ => Complex64::new(c.im, -c.re),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// A phase-free tensor product of single-qubit Pauli operators.
///
/// Per qubit, `(x, z)` is `(0,0)` identity, `(1,0)` x̂, `(1,1)` ŷ, `(0,1)` ẑ.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliWord {
    x: Bits,
    z: Bits,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingleQubit {
    I,
    X,
    Y,
    Z,
}

impl PauliWord {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            x: Bits::zeros(n_qubits),
            z: Bits::zeros(n_qubits),
        }
    }

    pub fn from_bits(x: Bits, z: Bits) -> Result<Self> {
        check_qubits(x.len(), z.len())?;
        Ok(Self { x, z })
    }

    /// Builds a word from `(qubit, operator)` factors; repeated qubits are rejected.
    pub fn from_factors(n_qubits: usize, factors: &[(usize, SingleQubit)]) -> Result<Self> {
        let mut w = Self::identity(n_qubits);
        let mut seen = Bits::zeros(n_qubits);
        for &(q, p) in factors {
            if q >= n_qubits {
                return Err(Error::contract(format!(
                    "qubit {q} out of range for {n_qubits} qubits"
                )));
            }
            if seen.get(q) {
                return Err(Error::contract(format!("qubit {q} appears twice")));
            }
            seen.set(q, true);
            w.set(q, p);
        }
        Ok(w)
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &Bits {
        &self.x
    }

    pub fn z_bits(&self) -> &Bits {
        &self.z
    }

    pub fn get(&self, q: usize) -> SingleQubit {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => SingleQubit::I,
            (true, false) => SingleQubit::X,
            (true, true) => SingleQubit::Y,
            (false, true) => SingleQubit::Z,
        }
    }

    pub fn set(&mut self, q: usize, p: SingleQubit) {
        let (x, z) = match p {
            SingleQubit::I => (false, false),
            SingleQubit::X => (true, false),
            SingleQubit::Y => (true, true),
            SingleQubit::Z => (false, true),
        };
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// True when the word contains only ẑ and identity factors.
    pub fn is_diagonal(&self) -> bool {
        self.x.is_zero()
    }

    pub fn weight(&self) -> u32 {
        self.x.or(&self.z).count_ones()
    }

    pub fn y_count(&self) -> u32 {
        self.x.and_count(&self.z)
    }

    pub fn y_parity(&self) -> bool {
        self.y_count() & 1 == 1
    }

    pub fn x_parity(&self) -> bool {
        self.x.count_ones() & 1 == 1
    }

    /// Symplectic product; `true` iff the words commute. Caller guarantees equal sizes.
    #[inline]
    pub fn commutes_unchecked(&self, other: &PauliWord) -> bool {
        (self.x.and_count(&other.z) + self.z.and_count(&other.x)) & 1 == 0
    }

    pub fn commutes(&self, other: &PauliWord) -> Result<bool> {
        check_qubits(self.n_qubits(), other.n_qubits())?;
        Ok(self.commutes_unchecked(other))
    }

    /// `self · other = i^k · word`. Caller guarantees equal sizes.
    #[inline]
    pub fn mul_unchecked(&self, other: &PauliWord) -> (Phase, PauliWord) {
        // With ŷ = i·x̂ẑ, a word is i^{x·z} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{z1·x2}.
        let x = self.x.xor(&other.x);
        let z = self.z.xor(&other.z);
        let k = self.x.and_count(&self.z)
            + other.x.and_count(&other.z)
            + 2 * self.z.and_count(&other.x)
            + 3 * x.and_count(&z);
        (Phase::new(k), PauliWord { x, z })
    }

    pub fn multiply(&self, other: &PauliWord) -> Result<(Phase, PauliWord)> {
        check_qubits(self.n_qubits(), other.n_qubits())?;
        Ok(self.mul_unchecked(other))
    }

    /// Action on a computational basis state: `P|b⟩ = i^k |b ⊕ x⟩`.
    #[inline]
    pub fn apply_to_basis(&self, basis: &Bits) -> (Phase, Bits) {
        let k = self.x.and_count(&self.z) + 2 * self.z.and_count(basis);
        (Phase::new(k), basis.xor(&self.x))
    }

    /// Same as [`apply_to_basis`](Self::apply_to_basis) for states packed in one `u64` (statevector indices).
    #[inline]
    pub fn apply_to_index(&self, index: u64) -> (Phase, u64) {
        let x = self.x.to_u64();
        let z = self.z.to_u64();
        let k = (x & z).count_ones() + 2 * (z & index).count_ones();
        (Phase::new(k), index ^ x)
    }

    /// Dense `2^n × 2^n` matrix, row-major, with qubit `q` ↦ bit `q` of the basis index.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.n_qubits();
        assert!(n <= 14, "dense matrix requested for {n} qubits");
        let dim = 1usize << n;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for col in 0..dim as u64 {
            let (phase, row) = self.apply_to_index(col);
            m[row as usize * dim + col as usize] = phase.to_complex();
        }
        m
    }
}

impl Ord for PauliWord {
    /// Lexicographic on `(x, z)` read as unsigned integers.
    fn cmp(&self, other: &Self) -> Ordering {
        self.x.cmp(&other.x).then_with(|| self.z.cmp(&other.z))
    }
}

impl PartialOrd for PauliWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse label such as `X0 Z2`, or `I` for the identity.
impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for q in self.x.or(&self.z).iter_ones() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let c = match self.get(q) {
                SingleQubit::X => 'X',
                SingleQubit::Y => 'Y',
                SingleQubit::Z => 'Z',
                SingleQubit::I => unreachable!(),
            };
            write!(f, "{c}{q}")?;
        }
        if first {
            f.write_str("I")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliWord[{}; {self}]", self.n_qubits())
    }
}

impl PauliWord {
    /// Parses whitespace-separated factors (`X0 Y3`) with strictly increasing
    /// qubit indices, or the literal `I`.
    pub fn parse(n_qubits: usize, text: &str) -> Result<Self> {
        let mut w = PauliWord::identity(n_qubits);
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens == ["I"] {
            return Ok(w);
        }
        if tokens.is_empty() {
            return Err(Error::parse(0, "empty Pauli word"));
        }
        let mut last: Option<usize> = None;
        for tok in tokens {
            let mut chars = tok.chars();
            let p = match chars.next() {
                Some('X') => SingleQubit::X,
                Some('Y') => SingleQubit::Y,
                Some('Z') => SingleQubit::Z,
                _ => return Err(Error::parse(0, format!("bad Pauli factor {tok:?}"))),
            };
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::parse(0, format!("bad qubit index in {tok:?}")))?;
            if q >= n_qubits {
                return Err(Error::parse(
                    0,
                    format!("qubit {q} out of range for {n_qubits} qubits"),
                ));
            }
            if last.is_some_and(|l| q <= l) {
                return Err(Error::parse(
                    0,
                    format!("qubit indices must strictly increase at {tok:?}"),
                ));
            }
            last = Some(q);
            w.set(q, p);
        }
        Ok(w)
    }
}

/// `FromStr` infers the qubit count as one past the highest index.
impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .split_whitespace()
            .filter_map(|t| t.get(1..).and_then(|d| d.parse::<usize>().ok()))
            .max()
            .map_or(1, |m| m + 1);
        PauliWord::parse(n, s)
    }
}

impl serde::Serialize for PauliWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: usize, s: &str) -> PauliWord {
        PauliWord::parse(n, s).unwrap()
    }

    fn dense_mul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                for j in 0..dim {
                    c[i * dim + j] += a[i * dim + k] * b[k * dim + j];
                }
            }
        }
        c
    }

    #[test]
    fn x_times_y_is_i_z() {
        let (p, c) = w(1, "X0").multiply(&w(1, "Y0")).unwrap();
        assert_eq!(p, Phase::I);
        assert_eq!(c, w(1, "Z0"));
    }

    #[test]
    fn identity_is_neutral() {
        let p = w(3, "X0 Y1 Z2");
        let (ph, c) = PauliWord::identity(3).multiply(&p).unwrap();
        assert_eq!(ph, Phase::ONE);
        assert_eq!(c, p);
    }

    #[test]
    fn two_qubit_product_matches_dense() {
        let a = w(2, "X0 Z1");
        let b = w(2, "Y0 Z1");
        let (ph, c) = a.multiply(&b).unwrap();
        assert_eq!(ph, Phase::I);
        assert_eq!(c, w(2, "Z0"));
        let lhs = dense_mul(&a.to_dense(), &b.to_dense(), 4);
        let rhs: Vec<_> = c.to_dense().into_iter().map(|v| ph.apply(v)).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutation_examples() {
        assert!(!w(1, "X0").commutes(&w(1, "Z0")).unwrap());
        assert!(!w(2, "X0 X1").commutes(&w(2, "Y0 X1")).unwrap());
        assert!(w(2, "X0 Y1").commutes(&w(2, "Y0 X1")).unwrap());
    }

    #[test]
    fn mismatched_sizes_error() {
        assert!(matches!(
            w(1, "X0").multiply(&w(2, "X1")),
            Err(Error::Dimension {
                expected: 1,
                found: 2
            })
        ));
        assert!(w(1, "X0").commutes(&w(2, "X1")).is_err());
    }

    #[test]
    fn parities() {
        assert!(w(2, "Y0 X1").y_parity());
        assert!(!w(2, "Y0 Y1").y_parity());
        assert!(!w(3, "X0 X1 Z2").x_parity());
    }

    #[test]
    fn parse_rejects_unordered_and_out_of_range() {
        assert!(PauliWord::parse(3, "X1 Z0").is_err());
        assert!(PauliWord::parse(3, "X3").is_err());
        assert!(PauliWord::parse(3, "Q1").is_err());
        assert_eq!(PauliWord::parse(3, "I").unwrap(), PauliWord::identity(3));
        assert_eq!(w(3, "X0 Z2").to_string(), "X0 Z2");
    }
}
