//! Command-line front end of the `qccilc` executable.

mod commands;
mod config;
mod session;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::ConfigFile;
pub use session::{RunManifest, Session};

use crate::dressing::{Direction, PipelineConfig};
use crate::error::{Error, Result};
use crate::fermion::{Mapping, SpinOrdering};

#[derive(Debug, Parser)]
#[command(
    name = "qccilc",
    version,
    about = "QCC Hamiltonian dressing with involutory linear combinations"
)]
pub struct Cli {
    /// TOML configuration; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "QCCILC_THREADS")]
    pub threads: Option<usize>,
    /// Manifest path; by default it is written beside the first output file.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// FCIDUMP to `.pauli` qubit Hamiltonian.
    Map(MapArgs),
    /// Optimize the mean-field product state.
    QmfOpt(QmfArgs),
    /// Ranked entangler partitions as CSV.
    Dis(DisArgs),
    /// Mutually anti-commuting odd-ŷ entanglers.
    Anticom(AnticomArgs),
    /// Optimal ILC amplitudes for the top DIS partitions.
    IlcOpt(IlcArgs),
    /// Apply an ILC or QCC dressing.
    Dress(DressArgs),
    /// Repeated ILC dressing followed by a QCC energy.
    Pipeline(PipelineArgs),
    /// Frozen-ansatz energies over several Hamiltonians as CSV.
    Scan(ScanArgs),
    /// QCC variational energy.
    Vqe(VqeArgs),
    /// Exact eigenvalues as CSV.
    Spectrum(SpectrumArgs),
    /// Term growth of random dressings as CSV.
    BenchGrowth(BenchGrowthArgs),
    /// ILC versus sampled top-gradient QCC ansätze as CSV.
    BenchQccSample(BenchQccArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct HamiltonianInput {
    /// `.pauli` Hamiltonian.
    pub hamiltonian: PathBuf,
    /// Reference determinant, qubit 0 first (e.g. `1100`). Falls back to the
    /// file's reference header, then to the mean-field minimum.
    #[arg(long)]
    pub reference: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct MapArgs {
    pub fcidump: PathBuf,
    #[arg(long)]
    pub mapping: Option<Mapping>,
    #[arg(long)]
    pub ordering: Option<SpinOrdering>,
    /// Add `(μ/2)Ŝ²`; the bare flag uses μ = 0.5.
    #[arg(long, num_args = 0..=1, default_missing_value = "0.5")]
    pub spin_penalty: Option<f64>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct QmfArgs {
    #[command(flatten)]
    pub input: HamiltonianInput,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DisArgs {
    #[command(flatten)]
    pub input: HamiltonianInput,
    /// Only the strongest partitions.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AnticomArgs {
    /// Rank candidates from this Hamiltonian's DIS.
    #[arg(required_unless_present = "flips")]
    pub hamiltonian: Option<PathBuf>,
    #[arg(long)]
    pub reference: Option<String>,
    /// Requested set size.
    #[arg(short = 'n', long)]
    pub n: Option<usize>,
    /// Solve exactly these flip vectors instead (comma separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "hamiltonian")]
    pub flips: Option<Vec<String>>,
    #[arg(long)]
    pub brute_force_budget: Option<usize>,
    #[arg(long)]
    pub exclude_single_qubit: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct IlcArgs {
    #[command(flatten)]
    pub input: HamiltonianInput,
    #[arg(short = 'n', long)]
    pub n: Option<usize>,
    /// Explicit entanglers separated by `;` instead of DIS selection.
    #[arg(long)]
    pub entanglers: Option<String>,
    #[arg(long)]
    pub relax_qmf: bool,
    #[arg(long)]
    pub brute_force_budget: Option<usize>,
    #[arg(long)]
    pub exclude_single_qubit: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DressArgs {
    pub hamiltonian: PathBuf,
    /// ILC ansatz as JSON (`ilc-opt` output or `{entanglers, tau, alphas}`).
    #[arg(long, required_unless_present = "qcc", conflicts_with = "qcc")]
    pub ansatz: Option<PathBuf>,
    /// QCC factor `WORD=tau`, repeatable; the first acts first on the state.
    #[arg(long)]
    pub qcc: Vec<String>,
    #[arg(long, default_value_t = Direction::Inverse)]
    pub direction: Direction,
    #[arg(long)]
    pub prune_threshold: Option<f64>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Dressing report JSON (stderr when absent).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Serialize)]
pub struct PipelineFlags {
    /// Number of dressings.
    #[arg(short = 'd', long)]
    pub d: Option<usize>,
    /// Entanglers per dressing.
    #[arg(short = 'n', long)]
    pub n: Option<usize>,
    /// Final QCC entanglers.
    #[arg(short = 'm', long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub relax_qmf: bool,
    #[arg(long)]
    pub energy_threshold: Option<f64>,
    #[arg(long)]
    pub gradient_threshold: Option<f64>,
    #[arg(long)]
    pub prune_threshold: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub exclude_single_qubit: bool,
    #[arg(long)]
    pub brute_force_budget: Option<usize>,
    #[arg(long)]
    pub qmf_restarts: Option<usize>,
    #[arg(long)]
    pub qcc_restarts: Option<usize>,
}

impl PipelineFlags {
    pub fn resolve(&self, file: &ConfigFile) -> PipelineConfig {
        let base = file.pipeline_defaults();
        PipelineConfig {
            d: self.d.unwrap_or(base.d),
            n: self.n.unwrap_or(base.n),
            m: self.m.unwrap_or(base.m),
            relax_qmf: self.relax_qmf || base.relax_qmf,
            energy_threshold: self.energy_threshold.unwrap_or(base.energy_threshold),
            gradient_threshold: self.gradient_threshold.unwrap_or(base.gradient_threshold),
            prune_threshold: self.prune_threshold.unwrap_or(base.prune_threshold),
            seed: self.seed.unwrap_or(base.seed),
            exclude_single_qubit: self.exclude_single_qubit || base.exclude_single_qubit,
            initial_reference: None,
            brute_force_budget: self.brute_force_budget.or(base.brute_force_budget),
            qmf_restarts: self.qmf_restarts.unwrap_or(base.qmf_restarts),
            qcc_restarts: self.qcc_restarts.unwrap_or(base.qcc_restarts),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub input: HamiltonianInput,
    #[command(flatten)]
    pub flags: PipelineFlags,
    /// Directory for the dressed Hamiltonian of every step.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Skip exact diagonalization above this many qubits.
    #[arg(long, default_value_t = 12)]
    pub exact_max_qubits: usize,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    /// `.pauli` Hamiltonians, one per scan point.
    #[arg(required = true)]
    pub hamiltonians: Vec<PathBuf>,
    /// Index of the point where entanglers are selected.
    #[arg(long, default_value_t = 0)]
    pub select: usize,
    #[arg(long)]
    pub reference: Option<String>,
    #[command(flatten)]
    pub flags: PipelineFlags,
    #[arg(long, default_value_t = 12)]
    pub exact_max_qubits: usize,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VqeArgs {
    #[command(flatten)]
    pub input: HamiltonianInput,
    /// Entangler count taken from the DIS.
    #[arg(short = 'm', long)]
    pub m: Option<usize>,
    /// Explicit entanglers separated by `;`, first acting first.
    #[arg(long)]
    pub entanglers: Option<String>,
    /// Also optimize the reference Bloch angles.
    #[arg(long)]
    pub relax_qmf: bool,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    pub hamiltonian: PathBuf,
    /// Lowest eigenvalues to print (all when absent).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchKind {
    Ilc,
    Qcc,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchGrowthArgs {
    #[arg(long, default_value_t = 12)]
    pub qubits: usize,
    /// Random Hamiltonian size.
    #[arg(long, default_value_t = 247)]
    pub terms: usize,
    /// Dress this Hamiltonian instead of random ones.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    #[arg(short = 'n', long, value_delimiter = ',', num_args = 1.., default_values_t = [4usize, 8, 10])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = BenchKind::Ilc)]
    pub kind: BenchKind,
    /// One row per (kind, N) with mean and standard deviation.
    #[arg(long)]
    pub summary: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchQccArgs {
    #[command(flatten)]
    pub input: HamiltonianInput,
    #[arg(short = 'n', long)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub brute_force_budget: Option<usize>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Map(_) => "map",
            Command::QmfOpt(_) => "qmf-opt",
            Command::Dis(_) => "dis",
            Command::Anticom(_) => "anticom",
            Command::IlcOpt(_) => "ilc-opt",
            Command::Dress(_) => "dress",
            Command::Pipeline(_) => "pipeline",
            Command::Scan(_) => "scan",
            Command::Vqe(_) => "vqe",
            Command::Spectrum(_) => "spectrum",
            Command::BenchGrowth(_) => "bench-growth",
            Command::BenchQccSample(_) => "bench-qcc-sample",
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env("QCCILC_LOG")
        .try_init();
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::contract("thread count must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::contract(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Parses arguments, runs the command and maps failures to exit codes.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    init_threads(cli.threads.or(file.threads))?;
    let mut session = Session::new();
    let (seed, resolved) = commands::dispatch(&cli.command, &file, &mut session)?;
    let config = serde_json::json!({ "args": &cli.command, "resolved": resolved });
    session.finish(cli.command.name(), seed, config, cli.manifest.as_deref())
}
