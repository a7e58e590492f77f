//! Statistics over batches of runs: empirical distributions, extreme-value
//! and log-Pearson III fits, reach probabilities and the between/within
//! strategy variance split.

mod anova;
mod ecdf;
mod gev;
mod lp3;
mod minimize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use anova::{variance_split, VarianceSplit};
pub use ecdf::{ks_statistic, Ecdf};
pub use gev::{fit_gev, lottery, lottery_report, GevFit, GevParams, LotteryReport, Orientation, Tail, TAIL_EPSILON};
pub use lp3::{fit_lp3, fit_lp3_full, Lp3Fit, Lp3FullFit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("non-positive value {value} at position {index}")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub(crate) fn check_finite(values: &[f64]) -> Result<(), StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySample);
    }
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(StatsError::NonFinite(i)),
        None => Ok(()),
    }
}

pub(crate) fn distinct_count(values: &[f64]) -> usize {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s.len()
}

/// The per-run quantities characterized by the statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    /// Best fitness at the end of a run.
    FinalR2,
    /// Improvement generation divided by the number of generations, one value
    /// per improvement event.
    RelativeMoment,
    /// Count of improvement events in a run.
    NEvolutions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub kind: ObservableKind,
    pub values: Vec<f64>,
}

impl Observable {
    /// Collects `kind` over a batch of best-fitness traces (generation 0
    /// first).
    pub fn from_traces<'a>(kind: ObservableKind, traces: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut values = Vec::new();
        for trace in traces {
            let generations = trace.len().saturating_sub(1);
            let events = (1..trace.len()).filter(|&g| trace[g] > trace[g - 1]);
            match kind {
                ObservableKind::FinalR2 => values.extend(trace.last().copied()),
                ObservableKind::NEvolutions => values.push(events.count() as f64),
                ObservableKind::RelativeMoment => {
                    values.extend(events.map(|g| g as f64 / generations as f64))
                }
            }
        }
        Self { kind, values }
    }
}

/// Share of traces whose best value reaches `fraction · optimum` at or
/// before generation `budget`.
pub fn prob_reach<'a>(
    traces: impl IntoIterator<Item = &'a [f64]>,
    optimum: f64,
    fraction: f64,
    budget: usize,
) -> Result<f64, StatsError> {
    if !(optimum > 0.0 && optimum.is_finite()) {
        return Err(StatsError::InvalidArgument(format!("optimum {optimum} must be positive")));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(StatsError::InvalidArgument(format!("fraction {fraction} not in (0, 1]")));
    }
    let target = fraction * optimum;
    let (mut hits, mut total) = (0usize, 0usize);
    for trace in traces {
        total += 1;
        let horizon = &trace[..trace.len().min(budget + 1)];
        if horizon.iter().any(|&b| b >= target) {
            hits += 1;
        }
    }
    if total == 0 {
        return Err(StatsError::EmptySample);
    }
    Ok(hits as f64 / total as f64)
}
