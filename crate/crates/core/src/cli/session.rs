use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pauli::{text, Bits, SparsePauliOp};

#[derive(Clone, Debug, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Inputs, configuration and outputs of one run, written beside its outputs.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: &'static str,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputFile>,
    pub outputs: Vec<String>,
    pub wall_time_seconds: f64,
}

/// Tracks inputs and outputs of one command for its manifest.
pub struct Session {
    started: Instant,
    inputs: Vec<InputFile>,
    outputs: Vec<PathBuf>,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Self {
            started: Instant::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path)?;
        let text = String::from_utf8(bytes)
            .map_err(|e| Error::parse(0, format!("{} is not UTF-8: {e}", path.display())))?;
        self.inputs.push(InputFile {
            path: path.display().to_string(),
            sha256: format!("{:x}", Sha256::digest(text.as_bytes())),
            bytes: text.len(),
        });
        Ok(text)
    }

    /// Reads a `.pauli` file and its optional `# reference <bits>` header.
    pub fn read_hamiltonian(&mut self, path: &Path) -> Result<(SparsePauliOp, Option<Bits>)> {
        let content = self.read(path)?;
        let h = text::parse(&content)?;
        let mut reference = None;
        for (i, line) in content.lines().enumerate() {
            if let Some(rest) = line.trim().strip_prefix("# reference ") {
                let bits: Bits = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(i + 1, "malformed reference header"))?;
                if bits.len() != h.n_qubits() {
                    return Err(Error::parse(
                        i + 1,
                        "reference length differs from the qubit count",
                    ));
                }
                reference = Some(bits);
            }
        }
        Ok((h, reference))
    }

    /// Writes to `path`, or to stdout when absent.
    pub fn emit(&mut self, path: Option<&Path>, content: &str) -> Result<()> {
        match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                fs::write(p, content)?;
                self.outputs.push(p.to_path_buf());
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(content.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }

    /// Writes the manifest to `explicit`, or beside the first output file.
    pub fn finish(
        self,
        command: &str,
        seed: Option<u64>,
        config: serde_json::Value,
        explicit: Option<&Path>,
    ) -> Result<()> {
        let target = match explicit {
            Some(p) => p.to_path_buf(),
            None => match self.outputs.first() {
                Some(first) => {
                    let mut name = first.as_os_str().to_owned();
                    name.push(".manifest.json");
                    PathBuf::from(name)
                }
                None => return Ok(()),
            },
        };
        let manifest = RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            inputs: self.inputs,
            outputs: self
                .outputs
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(target, json + "\n")?;
        Ok(())
    }
}

/// `.pauli` text with a reference header after the qubit line.
pub fn pauli_with_reference(h: &SparsePauliOp, reference: Option<&Bits>) -> String {
    let body = text::serialize(h);
    match reference {
        Some(r) => {
            let (first, rest) = body.split_once('\n').unwrap_or((&body, ""));
            format!("{first}\n# reference {r}\n{rest}")
        }
        None => body,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}
