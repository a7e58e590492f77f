//! The batch manifest: a JSON index of every file a batch wrote.

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::ga::{GaConfig, StrategyPair};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_FORMAT: &str = "mlr-ga-batch/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestDataset {
    /// File name inside the batch directory.
    pub file: String,
    pub digest: String,
    /// Generating indices when the dataset was synthesized.
    pub true_indices: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    /// Global index; the run's seed is `base_seed + index`.
    pub index: usize,
    pub strategy: StrategyPair,
    /// Index within the strategy.
    pub run: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub error: Option<String>,
    pub cfg: String,
    pub evo: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub tag: String,
    pub dataset: ManifestDataset,
    /// Exhaustive optimum used as the reach target, when enumeration was
    /// feasible.
    pub optimum: Option<f64>,
    pub optimum_indices: Option<Vec<usize>>,
    pub base_seed: u64,
    pub runs_per_strategy: usize,
    pub strategies: Vec<StrategyPair>,
    /// Shared settings; each run overrides `strategy` and `seed`.
    pub config: GaConfig,
    pub runs: Vec<RunEntry>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Every file in the batch directory this manifest refers to, excluding
    /// itself.
    pub fn files(&self) -> Vec<&str> {
        std::iter::once(self.dataset.file.as_str())
            .chain(self.runs.iter().flat_map(|r| [r.cfg.as_str(), r.evo.as_str()]))
            .collect()
    }
}

/// File names must stay inside the batch directory.
fn check_file_name(name: &str) -> Result<(), CliError> {
    let ok = !name.is_empty()
        && name != "."
        && name != ".."
        && !name.contains(['/', '\\', '\0'])
        && !name.contains(':');
    if ok {
        Ok(())
    } else {
        Err(CliError::Manifest(format!("file name `{name}` is not a plain name")))
    }
}

/// Parses and checks a manifest: known format, plain file names, consistent
/// run indexing and seeds.
pub fn parse_manifest(text: &str) -> Result<Manifest, CliError> {
    let m: Manifest = serde_json::from_str(text).map_err(|e| CliError::Manifest(e.to_string()))?;
    if m.format != MANIFEST_FORMAT {
        return Err(CliError::Manifest(format!("unknown format `{}`", m.format)));
    }
    for f in m.files() {
        check_file_name(f)?;
    }
    for (i, r) in m.runs.iter().enumerate() {
        if r.index != i {
            return Err(CliError::Manifest(format!("run {i} has index {}", r.index)));
        }
        if Some(r.seed) != m.base_seed.checked_add(i as u64) {
            return Err(CliError::Manifest(format!("run {i} has seed {}", r.seed)));
        }
    }
    if let Some(opt) = m.optimum {
        if !(opt.is_finite() && opt > 0.0) {
            return Err(CliError::Manifest(format!("optimum {opt} must be positive")));
        }
    }
    Ok(m)
}
