//! Qubit coupled cluster Hamiltonian dressing with involutory linear
//! combinations (ILC) of anti-commuting entanglers.

pub mod anticom;
pub mod cli;
pub mod dis;
pub mod dressing;
pub mod error;
pub mod fermion;
pub mod gf2;
pub mod ilc;
pub mod mean_field;
pub mod optim;
pub mod pauli;
pub mod sim;

pub use error::{Error, Result};
pub use pauli::{Bits, PauliWord, Phase, SparsePauliOp};
