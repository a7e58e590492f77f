//! Genetic-algorithm selection of descriptor subsets for multiple linear
//! regression, with the experiment harness and statistics used to compare
//! selection and survival strategies.
//!
//! * [`dataset`] loads, validates and synthesizes descriptor tables.
//! * [`regress`] fits OLS models; r² is the GA fitness.
//! * [`ga`] is the evolutionary engine and its nine strategy pairs.
//! * [`bench`] provides De Jong's F1–F5 as an alternative fitness.
//! * [`equilibrium`] simulates selection-free mutation/recombination.
//! * [`evstats`] characterizes batches of runs (ECDF, GEV, log-Pearson III,
//!   one-way variance split).
//! * [`cli`] holds the batch, exhaustive-search and report drivers used by the
//!   `mlr-ga` binary.

pub mod bench;
pub mod cli;
pub mod dataset;
pub mod equilibrium;
pub mod evstats;
pub mod ga;
pub mod regress;

/// Formats a real with 17 significant digits, which round-trips any `f64`
/// bit-exactly through `str::parse`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}
