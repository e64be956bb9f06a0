use std::time::Instant;

use serde::Serialize;

use super::{dress_ilc, growth_avg, Direction, DressingReport};
use crate::anticom::{find_anticommuting_set, max_set_size, AnticomOptions};
use crate::dis::{build_dis, expand_entanglers};
use crate::error::{check_qubits, Error, Result};
use crate::ilc::{optimize_ilc, IlcAnsatz, IlcOptions, Reference};
use crate::mean_field::{basis_expectation, optimize_qmf, QmfOptions, QmfState};
use crate::pauli::{Bits, PauliWord, SparsePauliOp};
use crate::sim::{optimize_qcc, QccOptions};

/// Settings for `d` rounds of ILC dressing with `n` entanglers each,
/// followed by a QCC energy with `m` entanglers.
#[derive(Clone, Debug, Serialize)]
pub struct PipelineConfig {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub relax_qmf: bool,
    pub energy_threshold: f64,
    pub gradient_threshold: f64,
    pub prune_threshold: f64,
    pub seed: u64,
    /// Leave single-qubit flips out of the candidate list.
    pub exclude_single_qubit: bool,
    /// Starting determinant, used as given. Without it the nearest
    /// determinant of the mean-field minimum is used.
    pub initial_reference: Option<Bits>,
    pub brute_force_budget: Option<usize>,
    pub qmf_restarts: usize,
    /// Total starts for the final QCC optimization.
    pub qcc_restarts: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            d: 1,
            n: 4,
            m: 5,
            relax_qmf: false,
            energy_threshold: 1e-6,
            gradient_threshold: 1e-6,
            prune_threshold: 1e-8,
            seed: 0x5eed,
            exclude_single_qubit: false,
            initial_reference: None,
            brute_force_budget: None,
            qmf_restarts: 4,
            qcc_restarts: 1,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::contract(
                "entanglers per dressing must be at least 1",
            ));
        }
        for (name, v) in [
            ("energy_threshold", self.energy_threshold),
            ("gradient_threshold", self.gradient_threshold),
            ("prune_threshold", self.prune_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::contract(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn qmf_options(&self) -> QmfOptions {
        QmfOptions {
            restarts: self.qmf_restarts,
            seed: self.seed,
            ..QmfOptions::default()
        }
    }

    pub fn ilc_options(&self) -> IlcOptions {
        IlcOptions {
            relax_qmf: self.relax_qmf,
            qmf: self.qmf_options(),
            ..IlcOptions::default()
        }
    }

    pub fn qcc_options(&self) -> QccOptions {
        QccOptions {
            relax_angles: self.relax_qmf,
            restarts: self.qcc_restarts,
            seed: self.seed,
            ..QccOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// All `d` dressings were applied.
    Completed,
    EmptyDis,
    GradientConverged,
    EnergyConverged,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineStep {
    pub index: usize,
    pub reference: Reference,
    pub reference_energy: f64,
    pub max_gradient: f64,
    pub dis_size: usize,
    pub requested_n: usize,
    pub effective_n: usize,
    pub selected_flips: Vec<Bits>,
    pub ansatz: IlcAnsatz,
    pub ilc_energy: f64,
    pub ilc_iterations: usize,
    pub report: DressingReport,
    /// Initial term count times the product of average growth factors so far.
    pub predicted_terms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineResult {
    /// Input Hamiltonian followed by one entry per applied dressing.
    #[serde(skip)]
    pub hamiltonians: Vec<SparsePauliOp>,
    pub steps: Vec<PipelineStep>,
    pub stop_reason: StopReason,
    pub final_reference: Reference,
    /// Reference energy on the last Hamiltonian.
    pub final_reference_energy: f64,
}

impl PipelineResult {
    pub fn final_hamiltonian(&self) -> &SparsePauliOp {
        self.hamiltonians
            .last()
            .expect("input Hamiltonian is always present")
    }

    /// Reference energy before every dressing, then the final one.
    pub fn reference_energies(&self) -> Vec<f64> {
        self.steps
            .iter()
            .map(|s| s.reference_energy)
            .chain([self.final_reference_energy])
            .collect()
    }
}

/// The configured determinant, or the lower-energy of the all-zeros state and
/// the nearest determinant to the mean-field minimum. Relaxed runs keep the
/// mean-field state itself when it is lower still.
pub fn starting_reference(h: &SparsePauliOp, cfg: &PipelineConfig) -> Result<Reference> {
    if let Some(b) = &cfg.initial_reference {
        check_qubits(h.n_qubits(), b.len())?;
        return Ok(Reference::Basis(b.clone()));
    }
    let start = Bits::zeros(h.n_qubits());
    let candidate = optimize_qmf(h, &QmfState::from_basis(&start), &cfg.qmf_options())?.state;
    let basis = crate::mean_field::nearest_basis_state(&candidate);
    let pick = if basis_expectation(h, &basis) < basis_expectation(h, &start) {
        basis
    } else {
        start
    };
    Ok(if cfg.relax_qmf {
        let e_basis = basis_expectation(h, &pick);
        let relaxed = optimize_qmf(h, &QmfState::from_basis(&pick), &cfg.qmf_options())?;
        if relaxed.energy < e_basis {
            Reference::Qmf(relaxed.state)
        } else {
            Reference::Basis(pick)
        }
    } else {
        Reference::Basis(pick)
    })
}

/// Reference for the next dressing round. Basis mode moves to the nearest
/// determinant of the relaxed mean-field state only if that does not raise
/// the energy.
fn next_reference(
    h: &SparsePauliOp,
    current: &Reference,
    cfg: &PipelineConfig,
) -> Result<Reference> {
    let relaxed = optimize_qmf(h, &current.to_qmf(), &cfg.qmf_options())?;
    if cfg.relax_qmf {
        return Ok(Reference::Qmf(relaxed.state));
    }
    let phi = current.nearest_basis();
    let candidate = crate::mean_field::nearest_basis_state(&relaxed.state);
    Ok(
        if basis_expectation(h, &candidate) < basis_expectation(h, &phi) {
            Reference::Basis(candidate)
        } else {
            Reference::Basis(phi)
        },
    )
}

/// Repeated DIS screening, anti-commuting set selection, ILC optimization
/// and `U†HU` dressing.
pub fn run_pipeline(h: &SparsePauliOp, cfg: &PipelineConfig) -> Result<PipelineResult> {
    cfg.validate()?;
    h.ensure_hermitian(1e-10)?;
    let n_qubits = h.n_qubits();
    let mut current = h.clone().with_threshold(cfg.prune_threshold);
    let mut reference = starting_reference(&current, cfg)?;
    let initial_terms = current.len() as f64;
    let mut predicted = initial_terms;
    let mut hamiltonians = vec![current.clone()];
    let mut steps = Vec::new();
    let mut stop_reason = StopReason::Completed;

    for k in 0..cfg.d {
        let reference_energy = reference.energy(&current)?;
        let phi = reference.nearest_basis();
        let dis: Vec<_> = build_dis(&current, &phi)?
            .into_iter()
            .filter(|p| !(cfg.exclude_single_qubit && p.single_qubit))
            .collect();
        let Some(top) = dis.first() else {
            log::info!("step {k}: empty DIS, stopping");
            stop_reason = StopReason::EmptyDis;
            break;
        };
        let max_gradient = top.gradient_magnitude;
        if max_gradient < cfg.gradient_threshold {
            log::info!("step {k}: largest gradient {max_gradient:.3e} below threshold");
            stop_reason = StopReason::GradientConverged;
            break;
        }
        let n_eff = cfg.n.min(max_set_size(n_qubits));
        if n_eff < cfg.n {
            log::warn!("at most {n_eff} anti-commuting entanglers exist on {n_qubits} qubits; requested {}", cfg.n);
        }
        let candidates: Vec<Bits> = dis.iter().map(|p| p.flip_x.clone()).collect();
        let set = find_anticommuting_set(
            &candidates,
            n_qubits,
            n_eff,
            &AnticomOptions {
                brute_force_budget: cfg.brute_force_budget,
            },
        )?;
        let ilc = optimize_ilc(&current, &reference, &set.words, &cfg.ilc_options())?;
        let started = Instant::now();
        let dressed = dress_ilc(&current, &ilc.ansatz, Direction::Inverse)?;
        let report = DressingReport::new(
            current.len(),
            dressed.len(),
            set.effective,
            started.elapsed().as_secs_f64(),
        );
        predicted *= growth_avg(set.effective);
        log::info!(
            "step {k}: E_ref {reference_energy:.10} E_ilc {:.10} terms {} -> {}",
            ilc.energy,
            current.len(),
            dressed.len()
        );
        let delta = reference_energy - ilc.energy;
        steps.push(PipelineStep {
            index: k,
            reference: reference.clone(),
            reference_energy,
            max_gradient,
            dis_size: dis.len(),
            requested_n: cfg.n,
            effective_n: set.effective,
            selected_flips: set
                .selected
                .iter()
                .map(|&i| candidates[i].clone())
                .collect(),
            ansatz: ilc.ansatz,
            ilc_energy: ilc.energy,
            ilc_iterations: ilc.iterations,
            report,
            predicted_terms: predicted,
        });
        current = dressed;
        hamiltonians.push(current.clone());
        reference = next_reference(&current, &ilc.reference, cfg)?;
        if delta.abs() < cfg.energy_threshold {
            log::info!("step {k}: energy change {delta:.3e} below threshold");
            stop_reason = StopReason::EnergyConverged;
            break;
        }
    }
    let final_reference_energy = reference.energy(&current)?;
    Ok(PipelineResult {
        hamiltonians,
        steps,
        stop_reason,
        final_reference: reference,
        final_reference_energy,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FinalQcc {
    pub entanglers: Vec<PauliWord>,
    pub taus: Vec<f64>,
    pub state: QmfState,
    pub energy: f64,
    pub converged: bool,
}

/// QCC energy on `h` with the top `m` entanglers of its DIS at the
/// reference; the strongest entangler acts first on the reference.
pub fn final_qcc(
    h: &SparsePauliOp,
    reference: &Reference,
    cfg: &PipelineConfig,
) -> Result<FinalQcc> {
    let dis = build_dis(h, &reference.nearest_basis())?;
    let dis: Vec<_> = dis
        .into_iter()
        .filter(|p| !(cfg.exclude_single_qubit && p.single_qubit))
        .collect();
    let ents = expand_entanglers(&dis, cfg.m);
    final_qcc_with(h, reference, ents, cfg)
}

fn final_qcc_with(
    h: &SparsePauliOp,
    reference: &Reference,
    ents: Vec<PauliWord>,
    cfg: &PipelineConfig,
) -> Result<FinalQcc> {
    let r = optimize_qcc(h, &reference.to_qmf(), &ents, &cfg.qcc_options())?;
    Ok(FinalQcc {
        entanglers: ents,
        taus: r.taus,
        state: r.state,
        energy: r.energy,
        converged: r.converged,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanPoint {
    pub index: usize,
    /// Reference energy on the undressed Hamiltonian.
    pub reference_energy: f64,
    pub ilc_energies: Vec<f64>,
    pub final_reference_energy: f64,
    pub final_qcc: Option<FinalQcc>,
    pub terms: usize,
    #[serde(skip)]
    pub dressed: SparsePauliOp,
}

impl ScanPoint {
    /// Final QCC energy when entanglers were requested, otherwise the final
    /// reference energy.
    pub fn final_energy(&self) -> f64 {
        self.final_qcc
            .as_ref()
            .map_or(self.final_reference_energy, |q| q.energy)
    }
}

/// Runs the pipeline once at `h_list[select_index]` and reuses its entangler
/// sets (and final QCC entanglers) at every point, re-optimizing amplitudes
/// and references only.
pub fn freeze_ansatz_scan(
    h_list: &[SparsePauliOp],
    cfg: &PipelineConfig,
    select_index: usize,
) -> Result<(PipelineResult, Vec<ScanPoint>)> {
    let selected = h_list.get(select_index).ok_or_else(|| {
        Error::contract(format!(
            "select index {select_index} out of range for {} points",
            h_list.len()
        ))
    })?;
    for h in h_list {
        check_qubits(selected.n_qubits(), h.n_qubits())?;
    }
    let plan = run_pipeline(selected, cfg)?;
    let final_ents = if cfg.m > 0 {
        Some(final_qcc(plan.final_hamiltonian(), &plan.final_reference, cfg)?.entanglers)
    } else {
        None
    };
    let sets: Vec<Vec<PauliWord>> = plan
        .steps
        .iter()
        .map(|s| s.ansatz.entanglers().to_vec())
        .collect();

    let points = h_list
        .iter()
        .enumerate()
        .map(|(index, h)| scan_point(index, h, &sets, final_ents.as_ref(), cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok((plan, points))
}

fn scan_point(
    index: usize,
    h: &SparsePauliOp,
    sets: &[Vec<PauliWord>],
    final_ents: Option<&Vec<PauliWord>>,
    cfg: &PipelineConfig,
) -> Result<ScanPoint> {
    let mut current = h.clone().with_threshold(cfg.prune_threshold);
    let mut reference = starting_reference(&current, cfg)?;
    let reference_energy = reference.energy(&current)?;
    let mut ilc_energies = Vec::with_capacity(sets.len());
    for ents in sets {
        let ilc = optimize_ilc(&current, &reference, ents, &cfg.ilc_options())?;
        current = dress_ilc(&current, &ilc.ansatz, Direction::Inverse)?;
        ilc_energies.push(ilc.energy);
        reference = next_reference(&current, &ilc.reference, cfg)?;
    }
    let final_reference_energy = reference.energy(&current)?;
    let final_qcc = final_ents
        .map(|e| final_qcc_with(&current, &reference, e.clone(), cfg))
        .transpose()?;
    Ok(ScanPoint {
        index,
        reference_energy,
        ilc_energies,
        final_reference_energy,
        final_qcc,
        terms: current.len(),
        dressed: current,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn op(n: usize, terms: &[(f64, &str)]) -> SparsePauliOp {
        SparsePauliOp::from_labels(n, terms).unwrap()
    }

    #[test]
    fn zero_rounds() {
        let h = op(2, &[(0.5, "Z0"), (0.3, "X0 X1"), (-0.2, "Z1")]);
        let cfg = PipelineConfig {
            d: 0,
            initial_reference: Some(Bits::zeros(2)),
            ..Default::default()
        };
        let r = run_pipeline(&h, &cfg).unwrap();
        assert_eq!(r.hamiltonians.len(), 1);
        assert!(r.steps.is_empty());
        assert_eq!(r.final_hamiltonian(), &h);
    }

    #[test]
    fn single_qubit_round() {
        let h = op(1, &[(1.0, "X0"), (1.0, "Z0")]);
        let cfg = PipelineConfig {
            d: 1,
            n: 1,
            m: 0,
            initial_reference: Some(Bits::zeros(1)),
            ..Default::default()
        };
        let r = run_pipeline(&h, &cfg).unwrap();
        assert_eq!(r.steps.len(), 1);
        let e = basis_expectation(r.final_hamiltonian(), &Bits::zeros(1));
        assert!((e + SQRT_2).abs() < 1e-12);
        assert!((r.steps[0].ilc_energy + SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn energies_non_increasing() {
        let h = op(
            3,
            &[
                (0.4, "Z0"),
                (0.3, "Z1"),
                (-0.2, "Z2"),
                (0.25, "X0 X1"),
                (0.15, "Y1 Y2"),
                (0.1, "X0 Z1 X2"),
                (0.05, "Z0 Z2"),
            ],
        );
        let cfg = PipelineConfig {
            d: 3,
            n: 3,
            m: 2,
            initial_reference: Some(Bits::zeros(3)),
            ..Default::default()
        };
        let r = run_pipeline(&h, &cfg).unwrap();
        let e = r.reference_energies();
        assert!(e.windows(2).all(|w| w[1] <= w[0] + 1e-10), "{e:?}");
        let exact = crate::sim::eigenvalues(&h).unwrap()[0];
        let q = final_qcc(r.final_hamiltonian(), &r.final_reference, &cfg).unwrap();
        assert!(q.energy >= exact - 1e-9 && q.energy <= r.final_reference_energy + 1e-12);
    }

    #[test]
    fn scan_single_point_matches_pipeline() {
        let h = op(
            3,
            &[
                (0.4, "Z0"),
                (0.3, "Z1"),
                (0.25, "X0 X1"),
                (0.15, "Y1 Y2"),
                (0.1, "X0 Z1 X2"),
            ],
        );
        let cfg = PipelineConfig {
            d: 2,
            n: 2,
            m: 2,
            initial_reference: Some(Bits::zeros(3)),
            ..Default::default()
        };
        let (plan, points) = freeze_ansatz_scan(std::slice::from_ref(&h), &cfg, 0).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(&points[0].dressed, plan.final_hamiltonian());
        let ilc: Vec<f64> = plan.steps.iter().map(|s| s.ilc_energy).collect();
        assert_eq!(points[0].ilc_energies, ilc);
        let q = final_qcc(plan.final_hamiltonian(), &plan.final_reference, &cfg).unwrap();
        assert_eq!(points[0].final_energy(), q.energy);
        assert!(freeze_ansatz_scan(&[h], &cfg, 1).is_err());
    }
}
