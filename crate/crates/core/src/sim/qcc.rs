use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{prepare_qmf, Statevector};
use crate::error::{check_qubits, Error, Result};
use crate::mean_field::QmfState;
use crate::optim::{self, LbfgsOptions};
use crate::pauli::{PauliWord, SparsePauliOp};

/// `Π_k e^{−iτ_k T_k/2} |Ω⟩` with `taus[0]` applied first (next to the reference).
pub fn qcc_state(s: &QmfState, ents: &[PauliWord], taus: &[f64]) -> Result<Statevector> {
    if ents.len() != taus.len() {
        return Err(Error::contract(format!(
            "{} entanglers but {} amplitudes",
            ents.len(),
            taus.len()
        )));
    }
    let mut v = prepare_qmf(s)?;
    for (t, &tau) in ents.iter().zip(taus) {
        v.apply_pauli_exp(t, tau)?;
    }
    Ok(v)
}

pub fn qcc_energy(
    h: &SparsePauliOp,
    s: &QmfState,
    ents: &[PauliWord],
    taus: &[f64],
) -> Result<f64> {
    qcc_state(s, ents, taus)?.expectation(h)
}

/// Energy and adjoint-mode gradient. Layout: `[τ_0…τ_{M−1}, θ_0, φ_0, …]`,
/// the angle block present only when `relax` is set.
fn energy_and_gradient(
    h: &SparsePauliOp,
    base: &QmfState,
    ents: &[PauliWord],
    relax: bool,
    params: &[f64],
    grad: &mut [f64],
) -> f64 {
    let m = ents.len();
    let state = if relax {
        QmfState {
            thetas: params[m..].iter().step_by(2).copied().collect(),
            phis: params[m + 1..].iter().step_by(2).copied().collect(),
        }
    } else {
        base.clone()
    };
    let mut psi = qcc_state(&state, ents, &params[..m]).expect("validated dimensions");
    let mut lam = Statevector {
        n_qubits: psi.n_qubits,
        amps: h.apply_dense(psi.amplitudes()),
    };
    let energy: f64 = psi
        .amps
        .iter()
        .zip(&lam.amps)
        .map(|(a, b)| (a.conj() * b).re)
        .sum();

    for k in (0..m).rev() {
        // dE/dτ_k = Re⟨λ_k|−iT_k|ψ_k⟩ with both vectors taken just after gate k.
        let t = &ents[k];
        let mut tpsi = psi.clone();
        tpsi.apply_cos_sin(t, 0.0, 1.0);
        let v: Complex64 = lam
            .amps
            .iter()
            .zip(&tpsi.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        grad[k] = v.re;
        psi.apply_pauli_exp(t, -params[k])
            .expect("validated dimensions");
        lam.apply_pauli_exp(t, -params[k])
            .expect("validated dimensions");
    }
    if relax {
        let n = state.n_qubits();
        for q in 0..n {
            let (th, ph) = (state.thetas[q], state.phis[q]);
            let (c, s) = ((th / 2.0).cos(), (th / 2.0).sin());
            let e = Complex64::from_polar(1.0, ph);
            let d_theta = [Complex64::new(-0.5 * s, 0.0), e * (0.5 * c)];
            let d_phi = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0) * e * s];
            // ∂|Ω⟩ swaps in the derivative of factor q; dividing it out would break at zeros.
            let mut dt = Complex64::new(0.0, 0.0);
            let mut dp = Complex64::new(0.0, 0.0);
            for (idx, l) in lam.amps.iter().enumerate() {
                let mut rest = Complex64::new(1.0, 0.0);
                for r in 0..n {
                    if r != q {
                        let bit = (idx >> r) & 1;
                        let (cr, sr) =
                            ((state.thetas[r] / 2.0).cos(), (state.thetas[r] / 2.0).sin());
                        rest *= if bit == 0 {
                            Complex64::new(cr, 0.0)
                        } else {
                            Complex64::from_polar(sr, state.phis[r])
                        };
                    }
                }
                let bit = (idx >> q) & 1;
                dt += l.conj() * rest * d_theta[bit];
                dp += l.conj() * rest * d_phi[bit];
            }
            grad[m + 2 * q] = 2.0 * dt.re;
            grad[m + 2 * q + 1] = 2.0 * dp.re;
        }
    }
    energy
}

#[derive(Clone, Debug)]
pub struct QccOptions {
    /// Also optimize the Bloch angles of the reference.
    pub relax_angles: bool,
    /// Total number of starts; the first is always the zero-amplitude point.
    pub restarts: usize,
    pub seed: u64,
    pub lbfgs: LbfgsOptions,
}

impl Default for QccOptions {
    fn default() -> Self {
        Self {
            relax_angles: false,
            restarts: 1,
            seed: 0x5eed,
            lbfgs: LbfgsOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QccResult {
    pub energy: f64,
    pub taus: Vec<f64>,
    pub state: QmfState,
    pub converged: bool,
    pub iterations: usize,
}

/// Minimizes the QCC energy from the zero-amplitude point at `s`, plus
/// seeded random-amplitude restarts.
pub fn optimize_qcc(
    h: &SparsePauliOp,
    s: &QmfState,
    ents: &[PauliWord],
    opts: &QccOptions,
) -> Result<QccResult> {
    h.ensure_hermitian(1e-10)?;
    check_qubits(h.n_qubits(), s.n_qubits())?;
    for t in ents {
        check_qubits(h.n_qubits(), t.n_qubits())?;
    }
    prepare_qmf(s)?;
    let m = ents.len();
    let mut x0 = vec![0.0; m];
    if opts.relax_angles {
        x0.extend(s.to_params());
    }
    let mut starts = vec![x0.clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 1..opts.restarts.max(1) {
        let mut x = x0.clone();
        for v in x.iter_mut().take(m) {
            *v = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        }
        starts.push(x);
    }
    let runs: Vec<_> = starts
        .par_iter()
        .map(|x| {
            optim::minimize(
                |p, g| energy_and_gradient(h, s, ents, opts.relax_angles, p, g),
                x,
                &opts.lbfgs,
            )
        })
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .map(|(_, r)| r)
        .expect("at least one start");
    let state = if opts.relax_angles {
        QmfState::from_params(&best.x[m..])
    } else {
        s.clone()
    };
    if !best.converged {
        log::warn!(
            "QCC optimization stopped after {} iterations",
            best.iterations
        );
    }
    Ok(QccResult {
        energy: best.value,
        taus: best.x[..m].to_vec(),
        state,
        converged: best.converged,
        iterations: best.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fd_check(relax: bool) {
        let h = SparsePauliOp::from_labels(
            3,
            &[
                (0.7, "X0 Y1"),
                (-0.3, "Z0 Z2"),
                (0.45, "Y0 X1 Z2"),
                (0.2, "I"),
                (0.5, "X0 X1 Y2"),
                (0.25, "Z1"),
            ],
        )
        .unwrap();
        let ents = vec![
            PauliWord::parse(3, "Y0 X1").unwrap(),
            PauliWord::parse(3, "X0 X1 Y2").unwrap(),
        ];
        let s = QmfState {
            thetas: vec![0.3, 2.5, 1.0],
            phis: vec![0.4, 1.9, 3.1],
        };
        let mut x = vec![0.37, -1.1];
        if relax {
            x.extend(s.to_params());
        }
        let mut g = vec![0.0; x.len()];
        let e = energy_and_gradient(&h, &s, &ents, relax, &x, &mut g);
        assert!((e - qcc_energy(&h, &s, &ents, &x[..2]).unwrap()).abs() < 1e-12);
        let mut scratch = g.clone();
        for i in 0..x.len() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            let fd = (energy_and_gradient(&h, &s, &ents, relax, &xp, &mut scratch)
                - energy_and_gradient(&h, &s, &ents, relax, &xm, &mut scratch))
                / 2e-6;
            assert!((fd - g[i]).abs() < 1e-7, "param {i}: fd {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn adjoint_gradient() {
        fd_check(false);
        fd_check(true);
    }

    #[test]
    fn zero_amplitudes_give_qmf_energy() {
        let h = SparsePauliOp::from_labels(2, &[(0.5, "X0 Y1"), (0.3, "Z0")]).unwrap();
        let s = QmfState {
            thetas: vec![0.2, 1.3],
            phis: vec![0.5, 2.0],
        };
        let ents = vec![PauliWord::parse(2, "Y0 X1").unwrap()];
        let a = qcc_energy(&h, &s, &ents, &[0.0]).unwrap();
        let b = crate::mean_field::qmf_expectation(&h, &s).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn single_entangler_matches_scan() {
        let h = SparsePauliOp::from_labels(2, &[(1.0, "X0 X1"), (0.4, "Z0"), (0.3, "Z1")]).unwrap();
        let s = QmfState::from_basis(&crate::Bits::zeros(2));
        let ents = vec![PauliWord::parse(2, "Y0 X1").unwrap()];
        let r = optimize_qcc(&h, &s, &ents, &QccOptions::default()).unwrap();
        // Golden-section scan oracle over one period.
        let f = |t: f64| qcc_energy(&h, &s, &ents, &[t]).unwrap();
        let (mut a, mut b) = (-PI, PI);
        let gr = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - gr * (b - a);
            let d = a + gr * (b - a);
            if f(c) < f(d) {
                b = d
            } else {
                a = c
            }
        }
        assert!((r.energy - f(0.5 * (a + b))).abs() < 1e-8);
        assert!(r.energy <= f(0.0) + 1e-12);
    }
}
