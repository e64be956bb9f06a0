//! Direct interaction set: entangler screening by energy gradient at a basis state.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_qubits, Error, Result};
use crate::pauli::{Bits, PauliWord, SingleQubit, SparsePauliOp};

/// Partitions whose gradient magnitude is at or below this are dropped.
pub const GRADIENT_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisPartition {
    pub flip_x: Bits,
    /// Signed gradient of the representative.
    pub gradient: f64,
    pub gradient_magnitude: f64,
    pub representative: PauliWord,
    /// Flips a single qubit; such generators are not entanglers proper.
    pub single_qubit: bool,
}

/// `⟨φ|op|φ⟩` keeping the imaginary part.
fn basis_expectation_complex(op: &SparsePauliOp, phi: &Bits) -> Complex64 {
    op.iter()
        .filter(|(w, _)| w.is_diagonal())
        .map(|(w, c)| if w.z_bits().dot(phi) { -c } else { c })
        .sum()
}

/// `dE/dτ` at `τ = 0` for `e^{−iτT/2}` acting on `|φ⟩`: `−(i/2)⟨φ|[H, T]|φ⟩`.
pub fn gradient(h: &SparsePauliOp, t: &PauliWord, phi: &Bits) -> Result<f64> {
    check_qubits(h.n_qubits(), phi.len())?;
    let comm = h.commutator(t)?;
    let v = basis_expectation_complex(&comm, phi) * Complex64::new(0.0, -0.5);
    Ok(v.re)
}

/// `x̂` on every flipped qubit except a single `ŷ` on the lowest one.
pub fn representative(flip_x: &Bits) -> Result<PauliWord> {
    let lowest = flip_x
        .first_one()
        .ok_or_else(|| Error::contract("flip vector is zero"))?;
    let mut w = PauliWord::identity(flip_x.len());
    for q in flip_x.iter_ones() {
        w.set(
            q,
            if q == lowest {
                SingleQubit::Y
            } else {
                SingleQubit::X
            },
        );
    }
    Ok(w)
}

/// Ranked DIS: one partition per distinct nonzero x-vector of `h` with a
/// nonzero gradient, by descending magnitude, ties by ascending flip vector.
pub fn build_dis(h: &SparsePauliOp, phi: &Bits) -> Result<Vec<DisPartition>> {
    h.ensure_hermitian(1e-10)?;
    check_qubits(h.n_qubits(), phi.len())?;
    let xs = h.distinct_x_vectors();
    let mut parts = xs
        .par_iter()
        .map(|x| {
            let rep = representative(x)?;
            let g = gradient(h, &rep, phi)?;
            Ok((g.abs() > GRADIENT_CUTOFF).then(|| DisPartition {
                flip_x: x.clone(),
                gradient: g,
                gradient_magnitude: g.abs(),
                representative: rep,
                single_qubit: x.count_ones() == 1,
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    parts.sort_by(|a, b| {
        b.gradient_magnitude
            .total_cmp(&a.gradient_magnitude)
            .then_with(|| a.flip_x.cmp(&b.flip_x))
    });
    Ok(parts)
}

/// Uniform odd-ŷ word supported on the flipped qubits of `flip_x`. Every such
/// word shares the representative's gradient magnitude at a basis state.
pub fn random_member<R: rand::Rng + ?Sized>(flip_x: &Bits, rng: &mut R) -> Result<PauliWord> {
    let qubits: Vec<usize> = flip_x.iter_ones().collect();
    let (&last, rest) = qubits
        .split_last()
        .ok_or_else(|| Error::contract("flip vector is zero"))?;
    let mut w = PauliWord::identity(flip_x.len());
    let mut odd = false;
    for &q in rest {
        let y = rng.gen::<bool>();
        odd ^= y;
        w.set(q, if y { SingleQubit::Y } else { SingleQubit::X });
    }
    w.set(last, if odd { SingleQubit::X } else { SingleQubit::Y });
    Ok(w)
}

/// First `m` entanglers: the representatives in rank order, then, while more
/// are needed, variants of each parent (rank order) where an even-sized
/// subset of its `x̂` positions becomes `ŷ`. Subsets go by size, then
/// lexicographically by position.
pub fn expand_entanglers(partitions: &[DisPartition], m: usize) -> Vec<PauliWord> {
    let mut out: Vec<PauliWord> = partitions
        .iter()
        .take(m)
        .map(|p| p.representative.clone())
        .collect();
    for p in partitions {
        if out.len() >= m {
            break;
        }
        let rep = &p.representative;
        let xs: Vec<usize> = rep
            .x_bits()
            .iter_ones()
            .filter(|&q| rep.get(q) == SingleQubit::X)
            .collect();
        let mut size = 2;
        while size <= xs.len() && out.len() < m {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                let mut w = rep.clone();
                for &i in &idx {
                    w.set(xs[i], SingleQubit::Y);
                }
                if !out.contains(&w) {
                    out.push(w);
                }
                if out.len() >= m {
                    break;
                }
                let Some(pos) = (0..size).rev().find(|&i| idx[i] < xs.len() - size + i) else {
                    break;
                };
                idx[pos] += 1;
                for i in pos + 1..size {
                    idx[i] = idx[i - 1] + 1;
                }
            }
            size += 2;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: usize, terms: &[(f64, &str)]) -> SparsePauliOp {
        SparsePauliOp::from_labels(n, terms).unwrap()
    }

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn gradient_example() {
        let h = op(2, &[(1.0, "X0 X1")]);
        let t = PauliWord::parse(2, "Y0 X1").unwrap();
        assert!((gradient(&h, &t, &bits("00")).unwrap() - 1.0).abs() < 1e-15);
        let z = PauliWord::parse(2, "Z0").unwrap();
        assert_eq!(
            gradient(&op(2, &[(1.0, "Z0 Z1")]), &z, &bits("00")).unwrap(),
            0.0
        );
    }

    #[test]
    fn representatives() {
        assert_eq!(representative(&bits("110")).unwrap().to_string(), "Y0 X1");
        assert_eq!(representative(&bits("01")).unwrap().to_string(), "Y1");
        assert_eq!(
            representative(&bits("1011")).unwrap().to_string(),
            "Y0 X2 X3"
        );
        assert!(representative(&bits("000")).is_err());
    }

    #[test]
    fn dis_example() {
        let dis = build_dis(&op(2, &[(1.0, "X0 X1"), (0.2, "Z0")]), &bits("00")).unwrap();
        assert_eq!(dis.len(), 1);
        assert_eq!(dis[0].flip_x, bits("11"));
        assert!((dis[0].gradient_magnitude - 1.0).abs() < 1e-15);
        assert!(
            build_dis(&op(2, &[(1.0, "Z0 Z1"), (0.3, "Z1")]), &bits("00"))
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn expansion() {
        let dis = build_dis(&op(3, &[(1.0, "X0 X1 X2")]), &bits("000")).unwrap();
        assert_eq!(dis.len(), 1);
        let e = expand_entanglers(&dis, 1);
        assert_eq!(e.len(), 1);
        let e = expand_entanglers(&dis, 2);
        assert_eq!(e[1].to_string(), "Y0 Y1 Y2");
        assert_eq!(expand_entanglers(&dis, 10).len(), 2);
    }

    #[test]
    fn random_members_share_magnitude() {
        use rand::SeedableRng;
        let h = op(
            4,
            &[(0.7, "X0 X1 Y2 Y3"), (0.2, "Z0 Z2"), (0.3, "X0 Y1 X2 Y3")],
        );
        let phi = bits("1100");
        let dis = build_dis(&h, &phi).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let w = random_member(&dis[0].flip_x, &mut rng).unwrap();
            assert!(w.y_parity());
            assert_eq!(w.x_bits(), &dis[0].flip_x);
            assert!(
                (gradient(&h, &w, &phi).unwrap().abs() - dis[0].gradient_magnitude).abs() < 1e-12
            );
        }
    }
}
