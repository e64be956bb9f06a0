use std::fmt::Write as _;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::ConfigFile;
use super::session::{pauli_with_reference, to_json, Session};
use super::*;
use crate::anticom::{find_anticommuting_set, solve_request, AnticomOptions, AnticomRequest};
use crate::dis::{build_dis, expand_entanglers, random_member, DisPartition};
use crate::dressing::{
    dress_ilc, dress_qcc_sequence, final_qcc, freeze_ansatz_scan, growth_avg, growth_worst,
    random_hamiltonian, random_ilc_transform, random_qcc_transform, run_pipeline,
    starting_reference, DressingReport,
};
use crate::fermion::{hartree_fock_bitstring, parse_fcidump, qubit_hamiltonian};
use crate::ilc::{optimize_ilc, IlcAnsatz, Reference};
use crate::mean_field::{basis_expectation, nearest_basis_state, optimize_qmf, QmfState};
use crate::pauli::{Bits, PauliWord, SparsePauliOp};
use crate::sim::{eigenvalues, ground_state, optimize_qcc, GroundStateOptions, QccOptions};

type Outcome = Result<(Option<u64>, Value)>;

pub(super) fn dispatch(command: &Command, file: &ConfigFile, s: &mut Session) -> Outcome {
    match command {
        Command::Map(a) => map(a, file, s),
        Command::QmfOpt(a) => qmf_opt(a, file, s),
        Command::Dis(a) => dis(a, file, s),
        Command::Anticom(a) => anticom(a, file, s),
        Command::IlcOpt(a) => ilc_opt(a, file, s),
        Command::Dress(a) => dress(a, file, s),
        Command::Pipeline(a) => pipeline(a, file, s),
        Command::Scan(a) => scan(a, file, s),
        Command::Vqe(a) => vqe(a, file, s),
        Command::Spectrum(a) => spectrum(a, s),
        Command::BenchGrowth(a) => bench_growth(a, file, s),
        Command::BenchQccSample(a) => bench_qcc_sample(a, file, s),
    }
}

fn parse_bits(text: &str, n_qubits: usize) -> Result<Bits> {
    let b: Bits = text.parse()?;
    if b.len() != n_qubits {
        return Err(Error::parse(
            0,
            format!(
                "reference {text:?} has {} bits for {n_qubits} qubits",
                b.len()
            ),
        ));
    }
    Ok(b)
}

/// Explicit flag, then file header, then `None`.
fn explicit_reference(
    flag: Option<&str>,
    header: Option<Bits>,
    n_qubits: usize,
) -> Result<Option<Bits>> {
    match flag {
        Some(t) => parse_bits(t, n_qubits).map(Some),
        None => Ok(header),
    }
}

fn load(
    s: &mut Session,
    input: &HamiltonianInput,
    cfg: &mut PipelineConfig,
) -> Result<(SparsePauliOp, Reference)> {
    let (h, header) = s.read_hamiltonian(&input.hamiltonian)?;
    cfg.initial_reference = explicit_reference(input.reference.as_deref(), header, h.n_qubits())?;
    let reference = starting_reference(&h, cfg)?;
    Ok((h, reference))
}

fn parse_entanglers(text: &str, n_qubits: usize) -> Result<Vec<PauliWord>> {
    text.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| PauliWord::parse(n_qubits, t))
        .collect()
}

fn filtered_dis(
    h: &SparsePauliOp,
    phi: &Bits,
    exclude_single_qubit: bool,
) -> Result<Vec<DisPartition>> {
    Ok(build_dis(h, phi)?
        .into_iter()
        .filter(|p| !(exclude_single_qubit && p.single_qubit))
        .collect())
}

fn map(a: &MapArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    let fi = parse_fcidump(&s.read(&a.fcidump)?)?;
    let mapping = a.mapping.or(file.map.mapping).unwrap_or_default();
    let ordering = a.ordering.or(file.map.ordering).unwrap_or_default();
    let mu = a.spin_penalty.or(file.map.spin_penalty);
    let h = qubit_hamiltonian(&fi, ordering, mapping, mu)?;
    let hf = hartree_fock_bitstring(&fi, ordering, mapping)?;
    s.emit(a.out.as_deref(), &pauli_with_reference(&h, Some(&hf)))?;
    eprintln!("{} qubits, {} terms, reference {hf}", h.n_qubits(), h.len());
    Ok((
        None,
        json!({ "mapping": mapping, "ordering": ordering, "spin_penalty": mu }),
    ))
}

fn qmf_opt(a: &QmfArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    let (h, header) = s.read_hamiltonian(&a.input.hamiltonian)?;
    let start = explicit_reference(a.input.reference.as_deref(), header, h.n_qubits())?
        .unwrap_or_else(|| Bits::zeros(h.n_qubits()));
    let mut opts = file.pipeline_defaults().qmf_options();
    opts.restarts = a.restarts.unwrap_or(opts.restarts);
    opts.seed = a.seed.unwrap_or(opts.seed);
    let r = optimize_qmf(&h, &QmfState::from_basis(&start), &opts)?;
    let nearest = nearest_basis_state(&r.state);
    let out = json!({
        "start": start,
        "result": r,
        "nearest_basis": nearest,
        "nearest_basis_energy": basis_expectation(&h, &nearest),
    });
    s.emit(a.out.as_deref(), &to_json(&out))?;
    Ok((Some(opts.seed), json!({ "restarts": opts.restarts })))
}

fn dis(a: &DisArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    let mut cfg = file.pipeline_defaults();
    let (h, reference) = load(s, &a.input, &mut cfg)?;
    let phi = reference.nearest_basis();
    let parts = build_dis(&h, &phi)?;
    let mut csv = String::from("rank,flip_x,representative,gradient,magnitude,single_qubit\n");
    for (rank, p) in parts.iter().take(a.top.unwrap_or(usize::MAX)).enumerate() {
        writeln!(
            csv,
            "{rank},{},{},{:?},{:?},{}",
            p.flip_x, p.representative, p.gradient, p.gradient_magnitude, p.single_qubit
        )
        .unwrap();
    }
    s.emit(a.out.as_deref(), &csv)?;
    Ok((None, json!({ "reference": phi })))
}

fn anticom(a: &AnticomArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    if let Some(flips) = &a.flips {
        let n_qubits = flips.first().map_or(0, |f| f.trim().len());
        let xs = flips
            .iter()
            .map(|f| parse_bits(f.trim(), n_qubits))
            .collect::<Result<Vec<_>>>()?;
        let req = AnticomRequest::new(n_qubits, xs.clone())?;
        let words = solve_request(&req)?.ok_or_else(|| Error::Infeasible {
            tried: vec![xs
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")],
        })?;
        s.emit(
            a.out.as_deref(),
            &to_json(&json!({ "flips": xs, "words": words })),
        )?;
        return Ok((None, json!({ "n_qubits": n_qubits })));
    }
    let path = a
        .hamiltonian
        .as_ref()
        .expect("clap requires a Hamiltonian without flips");
    let mut cfg = file.pipeline_defaults();
    cfg.brute_force_budget = a.brute_force_budget.or(cfg.brute_force_budget);
    let input = HamiltonianInput {
        hamiltonian: path.clone(),
        reference: a.reference.clone(),
    };
    let (h, reference) = load(s, &input, &mut cfg)?;
    let phi = reference.nearest_basis();
    let parts = filtered_dis(&h, &phi, a.exclude_single_qubit || cfg.exclude_single_qubit)?;
    let candidates: Vec<Bits> = parts.iter().map(|p| p.flip_x.clone()).collect();
    let n = a.n.unwrap_or(cfg.n);
    let sol = find_anticommuting_set(
        &candidates,
        h.n_qubits(),
        n,
        &AnticomOptions {
            brute_force_budget: cfg.brute_force_budget,
        },
    )?;
    let chosen: Vec<&DisPartition> = sol.selected.iter().map(|&i| &parts[i]).collect();
    s.emit(
        a.out.as_deref(),
        &to_json(&json!({ "reference": phi, "solution": sol, "partitions": chosen })),
    )?;
    Ok((
        None,
        json!({ "n": n, "brute_force_budget": cfg.brute_force_budget }),
    ))
}

fn ilc_opt(a: &IlcArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    let mut cfg = file.pipeline_defaults();
    cfg.relax_qmf |= a.relax_qmf;
    cfg.n = a.n.unwrap_or(cfg.n);
    cfg.brute_force_budget = a.brute_force_budget.or(cfg.brute_force_budget);
    cfg.exclude_single_qubit |= a.exclude_single_qubit;
    let (h, reference) = load(s, &a.input, &mut cfg)?;
    let (ents, selection) = match &a.entanglers {
        Some(text) => (parse_entanglers(text, h.n_qubits())?, None),
        None => {
            let parts = filtered_dis(&h, &reference.nearest_basis(), cfg.exclude_single_qubit)?;
            let candidates: Vec<Bits> = parts.iter().map(|p| p.flip_x.clone()).collect();
            let sol = find_anticommuting_set(
                &candidates,
                h.n_qubits(),
                cfg.n,
                &AnticomOptions {
                    brute_force_budget: cfg.brute_force_budget,
                },
            )?;
            (sol.words.clone(), Some(sol))
        }
    };
    let result = optimize_ilc(&h, &reference, &ents, &cfg.ilc_options())?;
    let out = json!({ "selection": selection, "result": result });
    s.emit(a.out.as_deref(), &to_json(&out))?;
    Ok((
        Some(cfg.seed),
        serde_json::to_value(&cfg).expect("config serializes"),
    ))
}

fn ansatz_from_json(v: &Value, n_qubits: usize) -> Result<IlcAnsatz> {
    let obj = v
        .pointer("/result/ansatz")
        .or_else(|| v.get("ansatz"))
        .unwrap_or(v);
    let bad = |what: &str| Error::parse(0, format!("ansatz JSON: {what}"));
    let ents = obj
        .get("entanglers")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing entanglers"))?
        .iter()
        .map(|w| {
            w.as_str()
                .ok_or_else(|| bad("entangler is not a string"))
                .and_then(|w| PauliWord::parse(n_qubits, w))
        })
        .collect::<Result<Vec<_>>>()?;
    let tau = obj
        .get("tau")
        .and_then(Value::as_f64)
        .ok_or_else(|| bad("missing tau"))?;
    let alphas = obj
        .get("alphas")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing alphas"))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| bad("non-numeric alpha")))
        .collect::<Result<Vec<_>>>()?;
    IlcAnsatz::new(ents, tau, alphas)
}

#[derive(Serialize)]
struct QccReport {
    input_terms: usize,
    output_terms: usize,
    growth_factor: f64,
    bound: f64,
}

fn dress(a: &DressArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    let (h, header) = s.read_hamiltonian(&a.hamiltonian)?;
    let prune = a
        .prune_threshold
        .unwrap_or(file.pipeline_defaults().prune_threshold);
    let h = h.with_threshold(prune);
    let started = Instant::now();
    let (dressed, report) = if let Some(path) = &a.ansatz {
        let v: Value = serde_json::from_str(&s.read(path)?)
            .map_err(|e| Error::parse(e.line(), e.to_string()))?;
        let ansatz = ansatz_from_json(&v, h.n_qubits())?;
        let out = dress_ilc(&h, &ansatz, a.direction)?;
        let report = DressingReport::new(
            h.len(),
            out.len(),
            ansatz.len(),
            started.elapsed().as_secs_f64(),
        );
        (
            out,
            serde_json::to_value(report).expect("report serializes"),
        )
    } else {
        let mut ents = Vec::new();
        let mut taus = Vec::new();
        for factor in &a.qcc {
            let (w, t) = factor
                .rsplit_once('=')
                .ok_or_else(|| Error::parse(0, format!("expected WORD=tau, got {factor:?}")))?;
            ents.push(PauliWord::parse(h.n_qubits(), w)?);
            taus.push(
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse(0, format!("angle {t:?}: {e}")))?,
            );
        }
        let out = match a.direction {
            Direction::Inverse => dress_qcc_sequence(&h, &ents, &taus)?,
            Direction::Forward => {
                let rev: Vec<PauliWord> = ents.iter().rev().cloned().collect();
                let neg: Vec<f64> = taus.iter().rev().map(|t| -t).collect();
                dress_qcc_sequence(&h, &rev, &neg)?
            }
        };
        let report = QccReport {
            input_terms: h.len(),
            output_terms: out.len(),
            growth_factor: out.len() as f64 / h.len().max(1) as f64,
            bound: (h.len() as f64) * 3f64.powi(ents.len() as i32),
        };
        (
            out,
            serde_json::to_value(report).expect("report serializes"),
        )
    };
    s.emit(
        a.out.as_deref(),
        &pauli_with_reference(&dressed, header.as_ref()),
    )?;
    match &a.report {
        Some(p) => s.emit(Some(p), &to_json(&report))?,
        None => eprint!("{}", to_json(&report)),
    }
    Ok((
        None,
        json!({ "direction": a.direction, "prune_threshold": prune }),
    ))
}

/// Exact ground state when the register is small enough.
fn exact_ground(h: &SparsePauliOp, max_qubits: usize) -> Result<Option<crate::sim::GroundState>> {
    if h.n_qubits() > max_qubits {
        return Ok(None);
    }
    ground_state(h, &GroundStateOptions::default()).map(Some)
}

fn pipeline(a: &PipelineArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    let mut cfg = a.flags.resolve(file);
    let (h, header) = s.read_hamiltonian(&a.input.hamiltonian)?;
    cfg.initial_reference = explicit_reference(a.input.reference.as_deref(), header, h.n_qubits())?;
    let result = run_pipeline(&h, &cfg)?;
    let qcc = if cfg.m > 0 {
        Some(final_qcc(
            result.final_hamiltonian(),
            &result.final_reference,
            &cfg,
        )?)
    } else {
        None
    };
    let final_energy = qcc
        .as_ref()
        .map_or(result.final_reference_energy, |q| q.energy);
    let energies = result.reference_energies();
    let non_increasing = energies.windows(2).all(|w| w[1] <= w[0] + 1e-10);
    if !non_increasing {
        log::error!("reference energies increased between dressings: {energies:?}");
    }

    let exact = exact_ground(&h, a.exact_max_qubits)?;
    let fidelity = match &exact {
        Some(g) => {
            let mut psi = match &qcc {
                Some(q) => crate::sim::qcc_state(&q.state, &q.entanglers, &q.taus)?,
                None => crate::sim::prepare_qmf(&result.final_reference.to_qmf())?,
            };
            for step in result.steps.iter().rev() {
                psi.apply_ilc(
                    step.ansatz.entanglers(),
                    step.ansatz.tau(),
                    step.ansatz.alphas(),
                )?;
            }
            let check = psi.expectation(&h)?;
            if (check - final_energy).abs() > 1e-8 {
                log::warn!("undressed state energy {check} differs from {final_energy}");
            }
            Some(g.state.overlap(&psi)?.norm_sqr())
        }
        None => None,
    };

    let terms: Vec<Value> = result
        .steps
        .iter()
        .map(|st| json!({ "step": st.index + 1, "terms": st.report.output_terms, "predicted_avg": st.predicted_terms }))
        .collect();
    let out = json!({
        "qubits": h.n_qubits(),
        "input_terms": h.len(),
        "reference_energies": energies,
        "reference_energies_non_increasing": non_increasing,
        "term_counts": terms,
        "pipeline": result,
        "final_qcc": qcc,
        "final_energy": final_energy,
        "exact_energy": exact.as_ref().map(|g| g.energy),
        "error_vs_exact": exact.as_ref().map(|g| final_energy - g.energy),
        "fidelity": fidelity,
    });
    s.emit(a.out.as_deref(), &to_json(&out))?;
    if let Some(dir) = &a.out_dir {
        for (k, hk) in result.hamiltonians.iter().enumerate().skip(1) {
            let r = result
                .steps
                .get(k)
                .map_or(&result.final_reference, |st| &st.reference);
            let path = dir.join(format!("step_{k}.pauli"));
            s.emit(
                Some(&path),
                &pauli_with_reference(hk, Some(&r.nearest_basis())),
            )?;
        }
    }
    Ok((
        Some(cfg.seed),
        serde_json::to_value(&cfg).expect("config serializes"),
    ))
}

fn scan(a: &ScanArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    let mut cfg = a.flags.resolve(file);
    let mut hs = Vec::with_capacity(a.hamiltonians.len());
    let mut headers = Vec::with_capacity(a.hamiltonians.len());
    for p in &a.hamiltonians {
        let (h, header) = s.read_hamiltonian(p)?;
        hs.push(h);
        headers.push(header);
    }
    let select = a.select;
    let n_qubits = hs.get(select).map(SparsePauliOp::n_qubits).ok_or_else(|| {
        Error::contract(format!(
            "select index {select} out of range for {} points",
            hs.len()
        ))
    })?;
    cfg.initial_reference =
        explicit_reference(a.reference.as_deref(), headers[select].clone(), n_qubits)?;
    let (plan, points) = freeze_ansatz_scan(&hs, &cfg, select)?;
    for st in &plan.steps {
        log::info!(
            "frozen set {}: {:?}",
            st.index,
            st.ansatz
                .entanglers()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
        );
    }
    let exact: Vec<Option<f64>> = hs
        .par_iter()
        .map(|h| exact_ground(h, a.exact_max_qubits).map(|g| g.map(|g| g.energy)))
        .collect::<Result<_>>()?;
    let mut csv = String::from("point,file,e_ref,e_ilc,e_final,e_exact,terms\n");
    for (p, e) in points.iter().zip(&exact) {
        let e_ilc = p.ilc_energies.last().copied().unwrap_or(p.reference_energy);
        let e_exact = e.map_or(String::new(), |v| format!("{v:?}"));
        writeln!(
            csv,
            "{},{},{:?},{:?},{:?},{},{}",
            p.index,
            a.hamiltonians[p.index].display(),
            p.reference_energy,
            e_ilc,
            p.final_energy(),
            e_exact,
            p.terms
        )
        .unwrap();
        if let Some(v) = e {
            if p.final_energy() < v - 1e-9 {
                log::error!("point {} lies below the exact energy", p.index);
            }
        }
    }
    s.emit(a.out.as_deref(), &csv)?;
    Ok((
        Some(cfg.seed),
        serde_json::to_value(&cfg).expect("config serializes"),
    ))
}

fn vqe(a: &VqeArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    let mut cfg = file.pipeline_defaults();
    cfg.m = a.m.unwrap_or(cfg.m);
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    let (h, reference) = load(s, &a.input, &mut cfg)?;
    let ents = match &a.entanglers {
        Some(text) => parse_entanglers(text, h.n_qubits())?,
        None => expand_entanglers(&build_dis(&h, &reference.nearest_basis())?, cfg.m),
    };
    let opts = QccOptions {
        relax_angles: a.relax_qmf || cfg.relax_qmf,
        restarts: a.restarts.unwrap_or(cfg.qcc_restarts),
        seed: cfg.seed,
        ..QccOptions::default()
    };
    let r = optimize_qcc(&h, &reference.to_qmf(), &ents, &opts)?;
    s.emit(
        a.out.as_deref(),
        &to_json(&json!({ "reference": reference, "entanglers": ents, "result": r })),
    )?;
    Ok((
        Some(cfg.seed),
        json!({ "m": ents.len(), "restarts": opts.restarts, "relax_angles": opts.relax_angles }),
    ))
}

fn spectrum(a: &SpectrumArgs, s: &mut Session) -> Outcome {
    let (h, _) = s.read_hamiltonian(&a.hamiltonian)?;
    let values = match eigenvalues(&h) {
        Ok(v) => v,
        Err(Error::CapExceeded { .. }) => {
            log::warn!(
                "{} qubits exceed the dense cap; reporting the ground energy only",
                h.n_qubits()
            );
            vec![ground_state(&h, &GroundStateOptions::default())?.energy]
        }
        Err(e) => return Err(e),
    };
    let mut csv = String::from("index,energy\n");
    for (i, e) in values
        .iter()
        .take(a.count.unwrap_or(usize::MAX))
        .enumerate()
    {
        writeln!(csv, "{i},{e:?}").unwrap();
    }
    s.emit(a.out.as_deref(), &csv)?;
    Ok((None, json!({ "count": a.count })))
}

/// Independent stream per (kind, N, index) so parallel trials replay exactly.
fn stream_rng(seed: u64, kind: u64, n: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((kind << 56) | ((n as u64) << 32) | index as u64);
    rng
}

struct GrowthRow {
    kind: &'static str,
    n: usize,
    trial: usize,
    input_terms: usize,
    terms: usize,
}

fn bench_growth(a: &BenchGrowthArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    let seed = a
        .seed
        .or(file.seed)
        .unwrap_or(PipelineConfig::default().seed);
    let loaded = match &a.hamiltonian {
        Some(p) => Some(s.read_hamiltonian(p)?.0),
        None => None,
    };
    let n_qubits = loaded.as_ref().map_or(a.qubits, SparsePauliOp::n_qubits);
    let mut kinds = Vec::new();
    if matches!(a.kind, BenchKind::Ilc | BenchKind::Both) {
        kinds.push(("ilc", 0u64));
    }
    if matches!(a.kind, BenchKind::Qcc | BenchKind::Both) {
        kinds.push(("qcc", 1u64));
    }
    let jobs: Vec<(&'static str, u64, usize, usize)> = kinds
        .iter()
        .flat_map(|&(k, id)| {
            a.n.iter()
                .flat_map(move |&n| (0..a.trials).map(move |t| (k, id, n, t)))
        })
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(kind, id, n, trial)| -> Result<GrowthRow> {
            let mut rng = stream_rng(seed, id, n, trial);
            let h = match &loaded {
                Some(h) => h.clone(),
                None => random_hamiltonian(n_qubits, a.terms, &mut rng)?,
            };
            let out = if id == 0 {
                let t = random_ilc_transform(n_qubits, n, &mut rng)?;
                dress_ilc(&h, &t, Direction::Inverse)?
            } else {
                let (ents, taus): (Vec<_>, Vec<_>) = random_qcc_transform(n_qubits, n, &mut rng)
                    .into_iter()
                    .unzip();
                dress_qcc_sequence(&h, &ents, &taus)?
            };
            if id == 0 && out.len() as f64 > h.len() as f64 * growth_worst(n) {
                log::error!("ILC dressing exceeded the worst-case bound");
            }
            Ok(GrowthRow {
                kind,
                n,
                trial,
                input_terms: h.len(),
                terms: out.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let predicted = |m: usize, n: usize| {
        (
            m as f64 * growth_avg(n),
            m as f64 * growth_worst(n),
            m as f64 * 1.5f64.powi(n as i32),
        )
    };
    let mut csv = String::new();
    if a.summary {
        csv.push_str(
            "kind,n,trials,mean_terms,std_terms,predicted_avg,predicted_worst,predicted_qcc\n",
        );
        for &(kind, _) in &kinds {
            for &n in &a.n {
                let group: Vec<&GrowthRow> =
                    rows.iter().filter(|r| r.kind == kind && r.n == n).collect();
                let k = group.len() as f64;
                let mean = group.iter().map(|r| r.terms as f64).sum::<f64>() / k;
                let var = group
                    .iter()
                    .map(|r| (r.terms as f64 - mean).powi(2))
                    .sum::<f64>()
                    / (k - 1.0).max(1.0);
                let m_in = group.iter().map(|r| r.input_terms as f64).sum::<f64>() / k;
                let (pa, pw, pq) = predicted(1, n);
                writeln!(
                    csv,
                    "{kind},{n},{},{mean:?},{:?},{:?},{:?},{:?}",
                    group.len(),
                    var.sqrt(),
                    m_in * pa,
                    m_in * pw,
                    m_in * pq
                )
                .unwrap();
            }
        }
    } else {
        csv.push_str(
            "kind,n,trial,input_terms,terms,predicted_avg,predicted_worst,predicted_qcc\n",
        );
        for r in &rows {
            let (pa, pw, pq) = predicted(r.input_terms, r.n);
            writeln!(
                csv,
                "{},{},{},{},{},{pa:?},{pw:?},{pq:?}",
                r.kind, r.n, r.trial, r.input_terms, r.terms
            )
            .unwrap();
        }
    }
    s.emit(a.out.as_deref(), &csv)?;
    Ok((
        Some(seed),
        json!({ "qubits": n_qubits, "terms": a.terms, "n": a.n, "trials": a.trials }),
    ))
}

fn bench_qcc_sample(a: &BenchQccArgs, file: &ConfigFile, s: &mut Session) -> Outcome {
    let mut cfg = file.pipeline_defaults();
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.brute_force_budget = a.brute_force_budget.or(cfg.brute_force_budget);
    let (h, header) = s.read_hamiltonian(&a.input.hamiltonian)?;
    cfg.initial_reference = explicit_reference(a.input.reference.as_deref(), header, h.n_qubits())?;
    let phi = starting_reference(&h, &cfg)?.nearest_basis();
    let parts = build_dis(&h, &phi)?;
    if parts.len() < a.n {
        return Err(Error::contract(format!(
            "DIS has {} partitions, {} requested",
            parts.len(),
            a.n
        )));
    }
    let candidates: Vec<Bits> = parts.iter().map(|p| p.flip_x.clone()).collect();
    let sol = find_anticommuting_set(
        &candidates,
        h.n_qubits(),
        a.n,
        &AnticomOptions {
            brute_force_budget: cfg.brute_force_budget,
        },
    )?;
    let reference = Reference::Basis(phi.clone());
    let ilc = optimize_ilc(&h, &reference, &sol.words, &cfg.ilc_options())?;
    let ilc_terms = dress_ilc(&h, &ilc.ansatz, Direction::Inverse)?.len();

    let top = &parts[..a.n];
    let samples = (0..a.samples)
        .into_par_iter()
        .map(|i| -> Result<(f64, usize)> {
            let mut rng = stream_rng(cfg.seed, 2, a.n, i);
            let ents = top
                .iter()
                .map(|p| random_member(&p.flip_x, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let opts = QccOptions {
                seed: cfg.seed,
                ..QccOptions::default()
            };
            let r = optimize_qcc(&h, &QmfState::from_basis(&phi), &ents, &opts)?;
            let terms = dress_qcc_sequence(&h, &ents, &r.taus)?.len();
            Ok((r.energy, terms))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = String::from("kind,sample,energy,terms\n");
    writeln!(csv, "ilc,0,{:?},{ilc_terms}", ilc.energy).unwrap();
    for (i, (e, t)) in samples.iter().enumerate() {
        writeln!(csv, "qcc,{i},{e:?},{t}").unwrap();
    }
    s.emit(a.out.as_deref(), &csv)?;
    let selected: Vec<usize> = sol.selected.clone();
    Ok((
        Some(cfg.seed),
        json!({ "n": a.n, "samples": a.samples, "ilc_partitions": selected, "input_terms": h.len() }),
    ))
}
