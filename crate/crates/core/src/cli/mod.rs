//! Drivers behind the `mlr-ga` subcommands: seeded batches, the exhaustive
//! optimum oracle and report generation.

mod batch;
mod exhaustive;
mod manifest;
mod report;

use std::path::Path;

use thiserror::Error;

pub use batch::{cmd_batch, run_file_names, BatchSpec, DatasetSource};
pub use exhaustive::{cmd_exhaustive, OptimumReport, ENUMERATION_LIMIT};
pub use manifest::{parse_manifest, Manifest, ManifestDataset, RunEntry, RunStatus, MANIFEST_FILE, MANIFEST_FORMAT};
pub use report::{cmd_report, REACH_FRACTION};

use crate::bench::BenchError;
use crate::dataset::DatasetError;
use crate::equilibrium::EquilibriumError;
use crate::evstats::StatsError;
use crate::ga::log::LogError;
use crate::ga::GaError;
use crate::regress::RegressError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Regress(#[from] RegressError),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{file}: {source}")]
    Log { file: String, source: LogError },
    #[error("C({m},{k}) = {count} subsets exceeds the enumeration limit {limit}")]
    EnumerationTooLarge { m: usize, k: usize, count: f64, limit: u64 },
    #[error("bad manifest: {0}")]
    Manifest(String),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} runs failed (see manifest)")]
    PartialFailure { failed: usize, total: usize },
}

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub(crate) fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// Parses a column of reals: one value per line, blank lines and `#`
/// comments skipped, a non-numeric first line taken as a header.
pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(_) => return Err(StatsError::NonFinite(out.len()).into()),
            Err(_) if first => {}
            Err(_) => {
                return Err(CliError::Usage(format!(
                    "line {}: `{line}` is not a number",
                    i + 1
                )))
            }
        }
        first = false;
    }
    if out.is_empty() {
        return Err(StatsError::EmptySample.into());
    }
    Ok(out)
}
