//! Optional TOML configuration supplying defaults that command-line flags override.
//!
//! ```toml
//! seed = 7
//! workers = 4
//!
//! [train]
//! lambda = 0.01
//! learning_rate = 0.01
//!
//! [bootstrap]
//! runs = 1000
//! top_k = 3
//!
//! [ssvm]
//! l2_weight = 0.1
//!
//! [cox]
//! l1_weight = 0.05
//!
//! [synth]
//! n = 728
//! sparsity = 3
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use survrank_core::baselines::{CoxL1Config, SsvmConfig};
use survrank_core::bootstrap::BootstrapConfig;
use survrank_core::model::TrainConfig;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub train: TrainConfig,
    pub bootstrap: BootstrapSection,
    pub ssvm: SsvmConfig,
    pub cox: CoxL1Config,
    pub synth: SynthSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSection {
    pub runs: usize,
    pub discovery_fraction: f64,
    pub top_k: usize,
    pub baseline_shuffles: usize,
}

impl Default for BootstrapSection {
    fn default() -> Self {
        let d = BootstrapConfig::default();
        Self {
            runs: d.runs,
            discovery_fraction: d.discovery_fraction,
            top_k: d.top_k,
            baseline_shuffles: d.baseline_shuffles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub n: usize,
    pub sparsity: usize,
    pub noise: f64,
    pub baseline_time: f64,
    pub horizon: Option<f64>,
    pub censoring_max: Option<f64>,
    pub event_fraction: Option<f64>,
}

impl Default for SynthSection {
    fn default() -> Self {
        let t = survrank_core::data::SyntheticGroundTruth::with_beta(Vec::new());
        Self {
            n: 728,
            sparsity: 3,
            noise: t.noise_scale,
            baseline_time: t.baseline_time,
            horizon: t.horizon,
            censoring_max: t.uniform_censoring_max,
            event_fraction: t.target_event_fraction,
        }
    }
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
    }
}
