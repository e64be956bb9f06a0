use std::path::Path;

use serde::Deserialize;

use crate::dressing::PipelineConfig;
use crate::error::{Error, Result};
use crate::fermion::{Mapping, SpinOrdering};

/// TOML run configuration. Command-line flags override every field.
///
/// ```toml
/// threads = 4
/// seed = 7
///
/// [pipeline]
/// d = 2
/// n = 8
/// m = 5
///
/// [map]
/// mapping = "jw"
/// ordering = "blocked"
/// spin_penalty = 0.5
/// ```
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub pipeline: PipelineSection,
    #[serde(default)]
    pub map: MapSection,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineSection {
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub relax_qmf: Option<bool>,
    pub energy_threshold: Option<f64>,
    pub gradient_threshold: Option<f64>,
    pub prune_threshold: Option<f64>,
    pub exclude_single_qubit: Option<bool>,
    pub brute_force_budget: Option<usize>,
    pub qmf_restarts: Option<usize>,
    pub qcc_restarts: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    pub mapping: Option<Mapping>,
    pub ordering: Option<SpinOrdering>,
    pub spin_penalty: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start].lines().count().max(1));
            Error::parse(line, format!("{}: {}", path.display(), e.message()))
        })
    }

    /// Defaults overlaid with this file's values.
    pub fn pipeline_defaults(&self) -> PipelineConfig {
        let d = PipelineConfig::default();
        let p = &self.pipeline;
        PipelineConfig {
            d: p.d.unwrap_or(d.d),
            n: p.n.unwrap_or(d.n),
            m: p.m.unwrap_or(d.m),
            relax_qmf: p.relax_qmf.unwrap_or(d.relax_qmf),
            energy_threshold: p.energy_threshold.unwrap_or(d.energy_threshold),
            gradient_threshold: p.gradient_threshold.unwrap_or(d.gradient_threshold),
            prune_threshold: p.prune_threshold.unwrap_or(d.prune_threshold),
            seed: self.seed.unwrap_or(d.seed),
            exclude_single_qubit: p.exclude_single_qubit.unwrap_or(d.exclude_single_qubit),
            initial_reference: None,
            brute_force_budget: p.brute_force_budget.or(d.brute_force_budget),
            qmf_restarts: p.qmf_restarts.unwrap_or(d.qmf_restarts),
            qcc_restarts: p.qcc_restarts.unwrap_or(d.qcc_restarts),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay() {
        let c: ConfigFile =
            toml::from_str("seed = 3\n[pipeline]\nd = 2\nrelax_qmf = true\n").unwrap();
        let p = c.pipeline_defaults();
        assert_eq!((p.d, p.n, p.seed, p.relax_qmf), (2, 4, 3, true));
        assert!(toml::from_str::<ConfigFile>("[pipeline]\nbogus = 1\n").is_err());
        let m: ConfigFile = toml::from_str("[map]\nmapping = \"parity\"\n").unwrap();
        assert_eq!(m.map.mapping, Some(Mapping::Parity));
    }
}
