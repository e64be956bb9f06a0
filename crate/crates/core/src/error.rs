use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("contract violation: {0}")]
    Contract(String),

    /// No mutually anti-commuting odd-ŷ set exists, even after greedy fallback.
    #[error("no anti-commuting entangler set found (tried partitions {tried:?})")]
    Infeasible { tried: Vec<String> },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{what}: {requested} qubits exceeds the configured cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("reference-dominated solution: |sin τ| = {0:.3e}, ILC amplitudes are undefined")]
    ReferenceDominated(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn contract(message: impl Into<String>) -> Self {
        Error::Contract(message.into())
    }

    /// Process exit code used by the CLI: 2 input, 3 infeasible, 4 non-convergence, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::Dimension { .. }
            | Error::CapExceeded { .. } => 2,
            Error::Infeasible { .. } => 3,
            Error::NonConvergence { .. } => 4,
            Error::Contract(_) | Error::ReferenceDominated(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_qubits(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
