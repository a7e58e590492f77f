use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::manifest::{Manifest, ManifestDataset, RunEntry, RunStatus, MANIFEST_FILE, MANIFEST_FORMAT};
use super::{cmd_exhaustive, create_dir, write_text, CliError};
use crate::dataset::{load_dataset, synth_dataset, Dataset, Schema};
use crate::ga::log::{EvoLog, RunConfigFile};
use crate::ga::{run, GaConfig, StrategyPair};

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    File(PathBuf, Schema),
    Synth {
        n: usize,
        m: usize,
        k_true: usize,
        noise_sd: f64,
        seed: u64,
    },
}

impl Default for DatasetSource {
    fn default() -> Self {
        DatasetSource::Synth {
            n: 50,
            m: 10,
            k_true: 2,
            noise_sd: 0.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSpec {
    pub source: DatasetSource,
    pub runs_per_strategy: usize,
    pub strategies: Vec<StrategyPair>,
    pub base_seed: u64,
    pub out_dir: PathBuf,
    /// Shared GA settings; `strategy` and `seed` are set per run.
    pub config: GaConfig,
    pub jobs: usize,
    pub tag: String,
}

impl BatchSpec {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            source: DatasetSource::default(),
            runs_per_strategy: 46,
            strategies: StrategyPair::all().to_vec(),
            base_seed: 1,
            out_dir: out_dir.into(),
            config: GaConfig::default(),
            jobs: 1,
            tag: "batch".into(),
        }
    }
}

/// `<tag>_<strategy>_<run>_cfg.txt` and `…_evo.txt`.
pub fn run_file_names(tag: &str, strategy: StrategyPair, run: usize) -> (String, String) {
    (
        format!("{tag}_{strategy}_{run:02}_cfg.txt"),
        format!("{tag}_{strategy}_{run:02}_evo.txt"),
    )
}

const DATASET_FILE: &str = "dataset.csv";

fn execute(data: &Dataset, digest: &str, dir: &Path, config: &GaConfig, entry: &RunEntry) -> Result<(), CliError> {
    let record = run(data, config)?;
    let cfg = RunConfigFile {
        config: config.clone(),
        fitness: "regression".into(),
        dataset_digest: digest.to_string(),
    };
    write_text(&dir.join(&entry.cfg), &cfg.to_text())?;
    write_text(&dir.join(&entry.evo), &EvoLog::from_record(&record).to_text())
}

/// Runs `runs_per_strategy` seeded runs for each strategy and writes their
/// cfg/evo pairs, the dataset and the manifest into `out_dir`.
///
/// Run `i` in strategy-major order uses seed `base_seed + i`. Failed runs are
/// recorded in the manifest; the call then reports
/// [`CliError::PartialFailure`] after the manifest is written.
pub fn cmd_batch(spec: &BatchSpec) -> Result<Manifest, CliError> {
    if spec.runs_per_strategy < 1 {
        return Err(CliError::Usage("runs per strategy must be ≥ 1".into()));
    }
    if spec.strategies.is_empty() {
        return Err(CliError::Usage("no strategies selected".into()));
    }
    if spec.tag.is_empty() || spec.tag.contains(['/', '\\', ':']) {
        return Err(CliError::Usage(format!("tag `{}` is not a plain name", spec.tag)));
    }
    spec.config.validate()?;

    let (data, true_indices) = match &spec.source {
        DatasetSource::File(path, schema) => (load_dataset(path, schema)?, None),
        &DatasetSource::Synth {
            n,
            m,
            k_true,
            noise_sd,
            seed,
        } => {
            let s = synth_dataset(n, m, k_true, noise_sd, seed)?;
            (s.data, Some(s.true_indices))
        }
    };
    // Fail fast on shape problems instead of once per run.
    crate::ga::RegressionProblem::new(&data, spec.config.k)?;

    let optimum = match cmd_exhaustive(&data, spec.config.k) {
        Ok(rep) => Some(rep),
        Err(CliError::EnumerationTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };

    create_dir(&spec.out_dir)?;
    let digest = data.digest();
    write_text(&spec.out_dir.join(DATASET_FILE), &data.to_csv())?;

    let mut runs: Vec<RunEntry> = Vec::new();
    for strategy in &spec.strategies {
        for r in 0..spec.runs_per_strategy {
            let index = runs.len();
            let (cfg, evo) = run_file_names(&spec.tag, *strategy, r);
            runs.push(RunEntry {
                index,
                strategy: *strategy,
                run: r,
                seed: spec.base_seed.wrapping_add(index as u64),
                status: RunStatus::Ok,
                error: None,
                cfg,
                evo,
            });
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let outcomes: Vec<Option<String>> = pool.install(|| {
        runs.par_iter()
            .map(|entry| {
                let config = GaConfig {
                    strategy: entry.strategy,
                    seed: entry.seed,
                    ..spec.config.clone()
                };
                execute(&data, &digest, &spec.out_dir, &config, entry)
                    .err()
                    .map(|e| e.to_string())
            })
            .collect()
    });
    for (entry, outcome) in runs.iter_mut().zip(outcomes) {
        if let Some(msg) = outcome {
            entry.status = RunStatus::Failed;
            entry.error = Some(msg);
        }
    }

    let manifest = Manifest {
        format: MANIFEST_FORMAT.into(),
        tag: spec.tag.clone(),
        dataset: ManifestDataset {
            file: DATASET_FILE.into(),
            digest,
            true_indices,
        },
        optimum: optimum.as_ref().map(|o| o.optimum).filter(|&v| v > 0.0),
        optimum_indices: optimum.map(|o| o.indices),
        base_seed: spec.base_seed,
        runs_per_strategy: spec.runs_per_strategy,
        strategies: spec.strategies.clone(),
        config: spec.config.clone(),
        runs,
    };
    write_text(&spec.out_dir.join(MANIFEST_FILE), &manifest.to_json())?;

    let failed = manifest.runs.iter().filter(|r| r.status == RunStatus::Failed).count();
    if failed > 0 {
        return Err(CliError::PartialFailure {
            failed,
            total: manifest.runs.len(),
        });
    }
    Ok(manifest)
}
