use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Statevector;
use crate::error::{Error, Result};
use crate::pauli::SparsePauliOp;

#[derive(Clone, Debug)]
pub struct GroundStateOptions {
    /// Largest register diagonalized densely.
    pub dense_max: usize,
    /// Hard limit for the dense path.
    pub dense_cap: usize,
    /// Hard limit for the iterative path.
    pub iterative_cap: usize,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub residual_tolerance: f64,
    pub seed: u64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self {
            dense_max: 8,
            dense_cap: 12,
            iterative_cap: 20,
            krylov_dim: 60,
            max_restarts: 200,
            residual_tolerance: 1e-9,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: Statevector,
    pub residual: f64,
}

fn dense_matrix(h: &SparsePauliOp) -> DMatrix<Complex64> {
    let dim = 1usize << h.n_qubits();
    DMatrix::from_row_slice(dim, dim, &h.to_dense())
}

/// Full ascending spectrum of a Hermitian operator.
pub fn eigenvalues(h: &SparsePauliOp) -> Result<Vec<f64>> {
    let cap = GroundStateOptions::default().dense_cap;
    if h.n_qubits() > cap {
        return Err(Error::CapExceeded {
            what: "dense diagonalization",
            requested: h.n_qubits(),
            cap,
        });
    }
    h.ensure_hermitian(1e-10)?;
    let mut ev: Vec<f64> = SymmetricEigen::new(dense_matrix(h))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

fn residual_norm(h: &SparsePauliOp, v: &[Complex64], e: f64) -> f64 {
    h.apply_dense(v)
        .iter()
        .zip(v)
        .map(|(hv, x)| (hv - x * e).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Lowest eigenpair: dense for small registers, restarted Lanczos otherwise.
pub fn ground_state(h: &SparsePauliOp, opts: &GroundStateOptions) -> Result<GroundState> {
    h.ensure_hermitian(1e-10)?;
    let n = h.n_qubits();
    if n <= opts.dense_max.min(opts.dense_cap) {
        let eig = SymmetricEigen::new(dense_matrix(h));
        let (idx, &energy) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty spectrum");
        let v: Vec<Complex64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let residual = residual_norm(h, &v, energy);
        return Ok(GroundState {
            energy,
            state: Statevector::from_amplitudes(v)?,
            residual,
        });
    }
    if n > opts.iterative_cap {
        return Err(Error::CapExceeded {
            what: "iterative diagonalization",
            requested: n,
            cap: opts.iterative_cap,
        });
    }
    lanczos(h, opts)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let nrm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    nrm
}

/// Lanczos with full reorthogonalization, restarted from the current Ritz vector.
fn lanczos(h: &SparsePauliOp, opts: &GroundStateOptions) -> Result<GroundState> {
    let dim = 1usize << h.n_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut start);
    let k_max = opts.krylov_dim.min(dim);
    let mut best = (f64::INFINITY, start.clone(), f64::INFINITY);

    for _ in 0..opts.max_restarts {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(k_max);
        let mut beta: Vec<f64> = Vec::with_capacity(k_max);
        for j in 0..k_max {
            let mut w = h.apply_dense(&basis[j]);
            alpha.push(dot(&basis[j], &w).re);
            // Two Gram-Schmidt passes against the whole basis.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            if j + 1 == k_max {
                break;
            }
            let nrm = normalize(&mut w);
            if nrm < 1e-12 {
                break;
            }
            beta.push(nrm);
            basis.push(w);
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("k ≥ 1");
        let y = eig.eigenvectors.column(idx);
        let mut ritz = vec![Complex64::new(0.0, 0.0); dim];
        for (b, &coef) in basis.iter().zip(y.iter()) {
            ritz.iter_mut().zip(b).for_each(|(r, x)| *r += x * coef);
        }
        normalize(&mut ritz);
        let res = residual_norm(h, &ritz, theta);
        if res < best.2 {
            best = (theta, ritz.clone(), res);
        }
        if res < opts.residual_tolerance || k < k_max.min(dim) {
            let (energy, v, residual) = best;
            if residual >= opts.residual_tolerance {
                // Invariant subspace exhausted but residual still large: numerical trouble.
                return Err(Error::NonConvergence {
                    what: "Lanczos",
                    iterations: 0,
                    residual,
                });
            }
            return Ok(GroundState {
                energy,
                state: Statevector::from_amplitudes(v)?,
                residual,
            });
        }
        start = ritz;
    }
    Err(Error::NonConvergence {
        what: "Lanczos",
        iterations: opts.max_restarts,
        residual: best.2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_closed_forms() {
        let h = SparsePauliOp::from_labels(1, &[(-1.0, "Z0")]).unwrap();
        let g = ground_state(&h, &GroundStateOptions::default()).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-14);
        assert!((g.state.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
        let h = SparsePauliOp::from_labels(1, &[(1.0, "X0"), (1.0, "Z0")]).unwrap();
        let g = ground_state(&h, &GroundStateOptions::default()).unwrap();
        assert!((g.energy + 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lanczos_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 7;
        let terms: Vec<_> = (0..60)
            .map(|_| {
                let x = crate::Bits::from_u64(n, rng.gen_range(0..1u64 << n));
                let z = crate::Bits::from_u64(n, rng.gen_range(0..1u64 << n));
                (
                    crate::PauliWord::from_bits(x, z).unwrap(),
                    Complex64::new(rng.gen_range(-1.0..1.0), 0.0),
                )
            })
            .collect();
        let h = SparsePauliOp::from_terms(n, terms).unwrap();
        let dense = ground_state(&h, &GroundStateOptions::default()).unwrap();
        let iter = ground_state(
            &h,
            &GroundStateOptions {
                dense_max: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            (dense.energy - iter.energy).abs() < 1e-10,
            "{} vs {}",
            dense.energy,
            iter.energy
        );
        assert!(iter.residual < 1e-9);
        let ev = eigenvalues(&h).unwrap();
        assert!((ev[0] - dense.energy).abs() < 1e-12);
    }
}
