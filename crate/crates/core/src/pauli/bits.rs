use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::Error;

type Limbs = SmallVec<[u64; 2]>;

/// Fixed-length bit vector packed into 64-bit limbs.
///
/// Bit `i` lives in limb `i / 64` at position `i % 64`, so qubit 0 is the
/// least-significant bit of limb 0. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    limbs: Limbs,
}

fn limb_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            limbs: SmallVec::from_elem(0, limb_count(len)),
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut out = Self::zeros(len);
        for &i in indices {
            out.set(i, true);
        }
        out
    }

    /// Low `len` bits of `value`; bit `i` of `value` becomes bit `i`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut out = Self::zeros(len);
        if len > 0 {
            out.limbs[0] = value;
            out.mask_tail();
        }
        out
    }

    /// Value of the first 64 bits as an integer (bit `i` ↦ `2^i`).
    pub fn to_u64(&self) -> u64 {
        self.limbs.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % 64);
        if value {
            self.limbs[i / 64] |= mask;
        } else {
            self.limbs[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    pub fn count_ones(&self) -> u32 {
        self.limbs.iter().map(|l| l.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Parity of `popcount(self & other)`.
    #[inline]
    pub fn dot(&self, other: &Bits) -> bool {
        self.and_count(other) & 1 == 1
    }

    #[inline]
    pub fn and_count(&self, other: &Bits) -> u32 {
        self.limbs
            .iter()
            .zip(other.limbs.iter())
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        debug_assert_eq!(self.len, other.len);
        Bits {
            len: self.len,
            limbs: self
                .limbs
                .iter()
                .zip(other.limbs.iter())
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(other.limbs.iter()) {
            *a ^= b;
        }
    }

    pub fn and(&self, other: &Bits) -> Bits {
        Bits {
            len: self.len,
            limbs: self
                .limbs
                .iter()
                .zip(other.limbs.iter())
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn or(&self, other: &Bits) -> Bits {
        Bits {
            len: self.len,
            limbs: self
                .limbs
                .iter()
                .zip(other.limbs.iter())
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn first_one(&self) -> Option<usize> {
        self.limbs
            .iter()
            .enumerate()
            .find(|(_, &l)| l != 0)
            .map(|(k, l)| k * 64 + l.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.limbs.iter().enumerate().flat_map(|(k, &limb)| {
            let mut l = limb;
            std::iter::from_fn(move || {
                if l == 0 {
                    None
                } else {
                    let t = l.trailing_zeros() as usize;
                    l &= l - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.limbs.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl Ord for Bits {
    /// Compares as unsigned integers (highest limb first); shorter vectors sort first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.limbs.iter().rev().cmp(other.limbs.iter().rev()))
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Renders qubit 0 first: `"01"` means bit 0 clear, bit 1 set.
impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut out = Bits::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.set(i, true),
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!("invalid bit character {c:?} in {s:?}"),
                    })
                }
            }
        }
        Ok(out)
    }
}

impl serde::Serialize for Bits {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_limb_roundtrip() {
        let b = Bits::from_indices(130, &[0, 63, 64, 129]);
        assert_eq!(b.count_ones(), 4);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(b.first_one(), Some(0));
        let s = b.to_string();
        assert_eq!(s.parse::<Bits>().unwrap(), b);
    }

    #[test]
    fn integer_order() {
        let a = Bits::from_u64(3, 0b011);
        let b = Bits::from_u64(3, 0b100);
        assert!(a < b);
        let hi = Bits::from_indices(70, &[65]);
        let lo = Bits::from_indices(70, &[3, 4, 5]);
        assert!(lo < hi);
    }

    #[test]
    fn display_is_qubit_zero_first() {
        assert_eq!(Bits::from_u64(2, 0b10).to_string(), "01");
        assert!("0a1".parse::<Bits>().is_err());
    }
}
