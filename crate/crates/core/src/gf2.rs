//! Dense linear algebra over GF(2) on packed rows.

use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::Bits;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    cols: usize,
    rows: Vec<Bits>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![Bits::zeros(cols); rows],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Bits>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension {
                expected: cols,
                found: r.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.rows[r].set(c, v);
    }

    pub fn row(&self, r: usize) -> &Bits {
        &self.rows[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut Bits {
        &mut self.rows[r]
    }

    /// `M·z` over GF(2).
    pub fn mul_vec(&self, z: &Bits) -> Bits {
        Bits::from_bools(&self.rows.iter().map(|r| r.dot(z)).collect::<Vec<_>>())
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Some solution of `m·z = rhs`, with free variables set to zero, or `None`
/// when the system is inconsistent.
pub fn solve_gf2(m: &BinaryMatrix, rhs: &Bits) -> Result<Option<Bits>> {
    if rhs.len() != m.n_rows() {
        return Err(Error::Dimension {
            expected: m.n_rows(),
            found: rhs.len(),
        });
    }
    let mut rows = m.rows.clone();
    let mut b: Vec<bool> = rhs.iter().collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
            continue;
        };
        rows.swap(r, p);
        b.swap(r, p);
        let (pivot_row, pb) = (rows[r].clone(), b[r]);
        for i in 0..rows.len() {
            if i != r && rows[i].get(c) {
                rows[i].xor_assign(&pivot_row);
                b[i] ^= pb;
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    if b[r..].iter().any(|&v| v) {
        return Ok(None);
    }
    let mut z = Bits::zeros(m.cols);
    for &(row, col) in &pivots {
        z.set(col, b[row]);
    }
    // Re-substitution guards against elimination bugs.
    if &m.mul_vec(&z) != rhs {
        return Err(Error::contract("GF(2) solution failed verification"));
    }
    Ok(Some(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn identity_system() {
        let m = BinaryMatrix::from_rows(3, vec![bits("100"), bits("010"), bits("001")]).unwrap();
        assert_eq!(solve_gf2(&m, &bits("101")).unwrap(), Some(bits("101")));
    }

    #[test]
    fn free_variables_zero() {
        let m = BinaryMatrix::from_rows(2, vec![bits("11")]).unwrap();
        assert_eq!(solve_gf2(&m, &bits("1")).unwrap(), Some(bits("10")));
    }

    #[test]
    fn inconsistent() {
        let m = BinaryMatrix::from_rows(2, vec![bits("10"), bits("10")]).unwrap();
        assert_eq!(solve_gf2(&m, &bits("10")).unwrap(), None);
    }

    #[test]
    fn wide_rows_span_limbs() {
        let n = 150;
        let mut m = BinaryMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
            if i + 1 < n {
                m.set(i, i + 1, true);
            }
        }
        let rhs = Bits::from_indices(n, &[0, 70, 149]);
        let z = solve_gf2(&m, &rhs).unwrap().unwrap();
        assert_eq!(m.mul_vec(&z), rhs);
    }
}
