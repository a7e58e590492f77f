//! Per-run text files: the evolution log (`*_evo.txt`) and the configuration
//! echo (`*_cfg.txt`).
//!
//! Evolution log:
//!
//! ```text
//! generation,best_r2,improved,distinct_genotypes,distinct_fitnesses
//! 0,9.1234567890123457e-1,0,48,47
//! 1,9.5000000000000000e-1,1,45,40
//! ```
//!
//! Configuration echo: one `key=value` per line, every [`GaConfig`] field
//! plus `fitness` and `dataset_digest`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Census, GaConfig, RunRecord, StrategyPair};
use crate::format_real;

pub const EVO_HEADER: &str = "generation,best_r2,improved,distinct_genotypes,distinct_fitnesses";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogError {
    #[error("missing or wrong header")]
    BadHeader,
    #[error("line {line}: {msg}")]
    BadLine { line: usize, msg: String },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("key `{key}`: {msg}")]
    BadValue { key: String, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvoRow {
    pub generation: usize,
    pub best: f64,
    pub improved: bool,
    pub census: Census,
}

/// A parsed evolution log.
#[derive(Debug, Clone, PartialEq)]
pub struct EvoLog {
    pub rows: Vec<EvoRow>,
}

impl EvoLog {
    pub fn from_record<G>(rec: &RunRecord<G>) -> Self {
        let rows = rec
            .best_trace
            .iter()
            .zip(&rec.census)
            .enumerate()
            .map(|(generation, (&best, &census))| EvoRow {
                generation,
                best,
                improved: rec.improvement_events.binary_search(&generation).is_ok(),
                census,
            })
            .collect();
        Self { rows }
    }

    pub fn best_trace(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.best).collect()
    }

    pub fn improvement_events(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.improved)
            .map(|r| r.generation)
            .collect()
    }

    /// Number of generations after generation 0.
    pub fn generations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(48 * (self.rows.len() + 1));
        out.push_str(EVO_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.generation,
                format_real(r.best),
                u8::from(r.improved),
                r.census.distinct_genotypes,
                r.census.distinct_fitnesses
            );
        }
        out
    }
}

/// Parses and checks an evolution log: generations run 0,1,2,… without gaps,
/// best values are finite and non-decreasing, and the `improved` flag marks
/// exactly the strict increases.
pub fn parse_evo_log(text: &str) -> Result<EvoLog, LogError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == EVO_HEADER => {}
        _ => return Err(LogError::BadHeader),
    }
    let mut rows: Vec<EvoRow> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let bad = |msg: String| LogError::BadLine { line: line_no, msg };
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", f.len())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("`{s}`: {e}")));
        let generation = int(f[0])?;
        let best: f64 = f[1].parse().map_err(|_| bad(format!("`{}` is not a number", f[1])))?;
        let improved = match f[2] {
            "0" => false,
            "1" => true,
            other => return Err(bad(format!("improved flag `{other}`"))),
        };
        let census = Census {
            distinct_genotypes: int(f[3])?,
            distinct_fitnesses: int(f[4])?,
        };
        if generation != rows.len() {
            return Err(bad(format!("expected generation {}, found {generation}", rows.len())));
        }
        if !best.is_finite() {
            return Err(bad("non-finite best value".into()));
        }
        let increased = match rows.last() {
            Some(prev) if best < prev.best => return Err(bad("best value decreased".into())),
            Some(prev) => best > prev.best,
            None => false,
        };
        if increased != improved {
            return Err(bad("improved flag disagrees with best values".into()));
        }
        rows.push(EvoRow {
            generation,
            best,
            improved,
            census,
        });
    }
    if rows.is_empty() {
        return Err(LogError::BadLine {
            line: 1,
            msg: "no generations".into(),
        });
    }
    Ok(EvoLog { rows })
}

/// Contents of a configuration echo file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfigFile {
    pub config: GaConfig,
    /// `regression` or `dejong:F1`…`dejong:F5`.
    pub fitness: String,
    /// Hex digest of the dataset, or `none` for benchmark functions.
    pub dataset_digest: String,
}

impl RunConfigFile {
    pub fn to_text(&self) -> String {
        let c = &self.config;
        format!(
            "population_size={}\nk={}\ngenerations={}\ncrossover_rate={}\nmutation_rate={}\n\
             tournament_size={}\nstrategy={}\nseed={}\nfitness={}\ndataset_digest={}\n",
            c.population_size,
            c.k,
            c.generations,
            format_real(c.crossover_rate),
            format_real(c.mutation_rate),
            c.tournament_size,
            c.strategy,
            c.seed,
            self.fitness,
            self.dataset_digest
        )
    }
}

pub fn parse_cfg(text: &str) -> Result<RunConfigFile, LogError> {
    let mut kv = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| LogError::BadLine {
            line: idx + 1,
            msg: "expected key=value".into(),
        })?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    fn get<'m>(kv: &'m BTreeMap<String, String>, key: &'static str) -> Result<&'m str, LogError> {
        kv.get(key).map(String::as_str).ok_or(LogError::MissingKey(key))
    }
    fn num<T: std::str::FromStr>(kv: &BTreeMap<String, String>, key: &'static str) -> Result<T, LogError>
    where
        T::Err: std::fmt::Display,
    {
        get(kv, key)?.parse().map_err(|e: T::Err| LogError::BadValue {
            key: key.into(),
            msg: e.to_string(),
        })
    }
    let strategy: StrategyPair = get(&kv, "strategy")?.parse().map_err(|e: super::GaError| {
        LogError::BadValue {
            key: "strategy".into(),
            msg: e.to_string(),
        }
    })?;
    let config = GaConfig {
        population_size: num(&kv, "population_size")?,
        k: num(&kv, "k")?,
        generations: num(&kv, "generations")?,
        crossover_rate: num(&kv, "crossover_rate")?,
        mutation_rate: num(&kv, "mutation_rate")?,
        tournament_size: num(&kv, "tournament_size")?,
        strategy,
        seed: num(&kv, "seed")?,
    };
    config.validate().map_err(|e| LogError::BadValue {
        key: "config".into(),
        msg: e.to_string(),
    })?;
    Ok(RunConfigFile {
        config,
        fitness: get(&kv, "fitness")?.to_string(),
        dataset_digest: get(&kv, "dataset_digest")?.to_string(),
    })
}
