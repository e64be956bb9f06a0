//! Exact similarity transformations of Pauli Hamiltonians.

mod pipeline;
mod random;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_qubits, Error, Result};
use crate::ilc::IlcAnsatz;
use crate::pauli::{OpBuilder, PauliWord, Phase, SparsePauliOp};

pub use pipeline::{
    final_qcc, freeze_ansatz_scan, run_pipeline, starting_reference, FinalQcc, PipelineConfig,
    PipelineResult, PipelineStep, ScanPoint, StopReason,
};
pub use random::{random_hamiltonian, random_ilc_transform, random_qcc_transform};

const PAR_TERMS: usize = 2048;

/// `U_ILC = e^{−iτA}`; `Inverse` gives `U†HU`, `Forward` gives `UHU†`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    #[default]
    Inverse,
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "inverse" => Ok(Direction::Inverse),
            _ => Err(Error::parse(0, format!("unknown direction {s:?}"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        })
    }
}

/// Runs `f` over the terms of `h` (in parallel when large) and merges the
/// contributions in term order, so results do not depend on scheduling.
fn transform_terms<F>(h: &SparsePauliOp, f: F) -> SparsePauliOp
where
    F: Fn(&PauliWord, Complex64, &mut Vec<(PauliWord, Complex64)>) + Sync + Send,
{
    let per_term = |(w, c): &(PauliWord, Complex64)| {
        let mut out = Vec::new();
        f(w, *c, &mut out);
        out
    };
    let chunks: Vec<Vec<(PauliWord, Complex64)>> = if h.len() >= PAR_TERMS {
        h.terms().par_iter().map(per_term).collect()
    } else {
        h.terms().iter().map(per_term).collect()
    };
    let mut b = OpBuilder::with_capacity(
        h.n_qubits(),
        h.threshold(),
        chunks.iter().map(Vec::len).sum(),
    );
    for chunk in chunks {
        for (w, c) in chunk {
            b.add(w, c);
        }
    }
    b.finish()
}

/// `H + sin τ·(−i/2)[H, T] + ½(1 − cos τ)(THT − H)`, which equals `U†HU`
/// for `U = e^{−iτT/2}`. Words commuting with `T` pass through; the rest
/// become `cos τ·P − i sin τ·PT`.
pub fn dress_qcc(h: &SparsePauliOp, t: &PauliWord, tau: f64) -> Result<SparsePauliOp> {
    check_qubits(h.n_qubits(), t.n_qubits())?;
    let (c, s) = (tau.cos(), tau.sin());
    Ok(transform_terms(h, |p, coeff, out| {
        if p.commutes_unchecked(t) {
            out.push((p.clone(), coeff));
        } else {
            out.push((p.clone(), coeff * c));
            let (ph, pt) = p.mul_unchecked(t);
            out.push((pt, ph.apply(coeff * Complex64::new(0.0, -s))));
        }
    }))
}

/// Sequential QCC dressing for `Π_k e^{−iτ_k T_k/2}` with `taus[0]` next to
/// the reference: the outermost generator is applied first.
pub fn dress_qcc_sequence(
    h: &SparsePauliOp,
    ents: &[PauliWord],
    taus: &[f64],
) -> Result<SparsePauliOp> {
    if ents.len() != taus.len() {
        return Err(Error::contract("entangler and amplitude counts differ"));
    }
    let mut out = h.clone();
    for (t, &tau) in ents.iter().zip(taus).rev() {
        out = dress_qcc(&out, t, tau)?;
    }
    Ok(out)
}

/// `cos²τ·H ∓ (i/2) sin 2τ·Σα_k[H, T_k] + sin²τ·Σ_{jk} α_jα_k T_jHT_k`
/// (upper sign for `Inverse`).
///
/// Per word `P` with `s_k = ±1` as `P` commutes or anti-commutes with `T_k`:
/// `T_kPT_k = s_kP`, `[P, T_k] = (1 − s_k)PT_k`, and each symmetric pair
/// `T_jPT_k + T_kPT_j = (s_j − s_k)·P·T_jT_k`, which vanishes unless the
/// signs differ. Pairs are thus cancelled before anything reaches the merge.
pub fn dress_ilc(h: &SparsePauliOp, a: &IlcAnsatz, direction: Direction) -> Result<SparsePauliOp> {
    let ents = a.entanglers();
    for t in ents {
        check_qubits(h.n_qubits(), t.n_qubits())?;
    }
    if ents.is_empty() {
        return Ok(h.clone());
    }
    let alphas = a.alphas();
    let tau = a.tau();
    let (c, s) = (tau.cos(), tau.sin());
    let (c2, s2, cs) = (c * c, s * s, c * s);
    let comm_sign = match direction {
        Direction::Inverse => -1.0,
        Direction::Forward => 1.0,
    };
    let n = ents.len();
    let pair_products: Vec<(usize, usize, Phase, PauliWord)> = (0..n)
        .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
        .map(|(j, k)| {
            let (ph, w) = ents[j].mul_unchecked(&ents[k]);
            (j, k, ph, w)
        })
        .collect();

    Ok(transform_terms(h, |p, coeff, out| {
        let signs: Vec<bool> = ents.iter().map(|t| p.commutes_unchecked(t)).collect();
        let diag: f64 = alphas
            .iter()
            .zip(&signs)
            .map(|(a, &commutes)| if commutes { a * a } else { -a * a })
            .sum();
        out.push((p.clone(), coeff * (c2 + s2 * diag)));
        // ∓ i·cs·Σ α_k [P, T_k] = ∓ 2i·cs·Σ_{anti} α_k P T_k
        for (k, t) in ents.iter().enumerate() {
            if !signs[k] {
                let (ph, pt) = p.mul_unchecked(t);
                out.push((
                    pt,
                    ph.apply(coeff * Complex64::new(0.0, comm_sign * 2.0 * cs * alphas[k])),
                ));
            }
        }
        for (j, k, ph_jk, w_jk) in &pair_products {
            if signs[*j] == signs[*k] {
                continue;
            }
            let sj = if signs[*j] { 1.0 } else { -1.0 };
            let sk = if signs[*k] { 1.0 } else { -1.0 };
            let (ph, w) = p.mul_unchecked(w_jk);
            let scale = s2 * alphas[*j] * alphas[*k] * (sj - sk);
            out.push((w, (ph * *ph_jk).apply(coeff * scale)));
        }
    }))
}

/// `(N² + N + 2)/2`.
pub fn growth_worst(n: usize) -> f64 {
    (n * n + n + 2) as f64 / 2.0
}

/// `(N² + N + 4)/4`.
pub fn growth_avg(n: usize) -> f64 {
    (n * n + n + 4) as f64 / 4.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DressingReport {
    pub input_terms: usize,
    pub output_terms: usize,
    pub growth_factor: f64,
    pub predicted_avg: f64,
    pub predicted_worst: f64,
    /// Seconds; excluded from deterministic outputs.
    #[serde(skip)]
    pub wall_time: f64,
}

impl DressingReport {
    pub fn new(
        input_terms: usize,
        output_terms: usize,
        n_entanglers: usize,
        wall_time: f64,
    ) -> Self {
        Self {
            input_terms,
            output_terms,
            growth_factor: if input_terms == 0 {
                0.0
            } else {
                output_terms as f64 / input_terms as f64
            },
            predicted_avg: growth_avg(n_entanglers),
            predicted_worst: growth_worst(n_entanglers),
            wall_time,
        }
    }
}
