//! The `.pauli` text format.
//!
//! ```text
//! qubits 4
//! # comment
//! -0.8105 0.0 I
//! 0.1721 0.0 Z0
//! 0.0452 0.0 X0 X1 Y2 Y3
//! ```
//!
//! Each term line is `<re> <im> <word>`. Terms are written in canonical
//! order with shortest round-trip float formatting, so a parse of the
//! output reproduces every coefficient bit for bit.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{OpBuilder, PauliWord, SparsePauliOp, DEFAULT_PRUNE_THRESHOLD};
use crate::error::{Error, Result};

pub fn serialize(op: &SparsePauliOp) -> String {
    let mut out = String::with_capacity(32 * (op.len() + 1));
    writeln!(out, "qubits {}", op.n_qubits()).unwrap();
    for (w, c) in op.iter() {
        writeln!(out, "{:?} {:?} {}", c.re, c.im, w).unwrap();
    }
    out
}

pub fn parse(text: &str) -> Result<SparsePauliOp> {
    parse_with_threshold(text, DEFAULT_PRUNE_THRESHOLD)
}

/// Duplicate words are summed; coefficients below `threshold` are dropped.
pub fn parse_with_threshold(text: &str, threshold: f64) -> Result<SparsePauliOp> {
    let mut builder: Option<OpBuilder> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match builder.as_mut() {
            None => {
                let (Some("qubits"), Some(n), None) = (tokens.next(), tokens.next(), tokens.next())
                else {
                    return Err(Error::parse(lineno, "expected header `qubits <n>`"));
                };
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad qubit count {n:?}")))?;
                if n == 0 {
                    return Err(Error::parse(lineno, "qubit count must be positive"));
                }
                builder = Some(OpBuilder::new(n, threshold));
            }
            Some(b) => {
                let re = parse_f64(tokens.next(), lineno, "real part")?;
                let im = parse_f64(tokens.next(), lineno, "imaginary part")?;
                let rest: Vec<&str> = tokens.collect();
                if rest.is_empty() {
                    return Err(Error::parse(lineno, "missing Pauli word"));
                }
                let word =
                    PauliWord::parse(b.n_qubits(), &rest.join(" ")).map_err(|e| match e {
                        Error::Parse { message, .. } => Error::parse(lineno, message),
                        other => other,
                    })?;
                b.add(word, Complex64::new(re, im));
            }
        }
    }
    builder
        .map(OpBuilder::finish)
        .ok_or_else(|| Error::parse(1, "missing header `qubits <n>`"))
}

fn parse_f64(tok: Option<&str>, line: usize, what: &str) -> Result<f64> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("non-numeric {what} {tok:?}")))
}
