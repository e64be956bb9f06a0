//! Pauli words and sparse Pauli operators in the binary symplectic representation.

mod bits;
mod op;
pub mod text;
mod word;

pub use bits::Bits;
pub use op::{OpBuilder, SparsePauliOp, DEFAULT_PRUNE_THRESHOLD};
pub use word::{PauliWord, Phase, SingleQubit};

/// Number of `n_qubits`-qubit Pauli words with an even number of ŷ factors:
/// `Σ_m C(n, 2m)·3^(n−2m)`.
pub fn count_even_y_words(n_qubits: u32) -> u128 {
    (0..=n_qubits / 2)
        .map(|m| binomial(n_qubits, 2 * m) * 3u128.pow(n_qubits - 2 * m))
        .sum()
}

/// Words with even ŷ-count and an even number of x̂/ŷ factors.
pub fn count_even_y_even_x_words(n_qubits: u32) -> u128 {
    // Per qubit choose I/Z (no flip), X (flip), or Y (flip + y); count the
    // assignments where both the flip count and the y count are even.
    // Generating function (2 + a + ab)^n evaluated at a, b = ±1.
    let n = n_qubits;
    let eval = |a: i128, b: i128| (2 + a + a * b).pow(n);
    let total = eval(1, 1) + eval(1, -1) + eval(-1, 1) + eval(-1, -1);
    (total / 4) as u128
}

pub(crate) fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(n: u32, need_even_x: bool) -> u128 {
        let mut count = 0;
        for code in 0..4u64.pow(n) {
            let x = Bits::from_u64(n as usize, code & ((1 << n) - 1));
            let z = Bits::from_u64(n as usize, code >> n);
            let w = PauliWord::from_bits(x, z).unwrap();
            if !w.y_parity() && (!need_even_x || !w.x_parity()) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn even_y_counts() {
        assert_eq!(count_even_y_words(4), 136);
        assert_eq!(count_even_y_words(1), 3);
        assert_eq!(count_even_y_words(2), 10);
        for n in 1..=6 {
            assert_eq!(count_even_y_words(n), brute_force(n, false), "n = {n}");
        }
    }

    #[test]
    fn even_y_even_x_counts() {
        for n in 1..=6 {
            assert_eq!(
                count_even_y_even_x_words(n),
                brute_force(n, true),
                "n = {n}"
            );
        }
        assert_eq!(count_even_y_even_x_words(6), 1056);
    }
}
