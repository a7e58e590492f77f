use serde::{Deserialize, Serialize};

use super::StatsError;

/// One-way decomposition of a grouped sample. Variances divide by the total
/// count, so `between_var + within_var` is the population variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceSplit {
    pub between_ss: f64,
    pub within_ss: f64,
    pub total_ss: f64,
    pub between_sd: f64,
    pub within_sd: f64,
    pub groups: usize,
    pub n: usize,
}

pub fn variance_split<'a>(groups: impl IntoIterator<Item = &'a [f64]>) -> Result<VarianceSplit, StatsError> {
    let groups: Vec<&[f64]> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    let n: usize = groups.iter().map(|g| g.len()).sum();
    if n == 0 {
        return Err(StatsError::EmptySample);
    }
    if let Some(bad) = groups.iter().flat_map(|g| g.iter()).position(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite(bad));
    }
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / n as f64;
    let mut between_ss = 0.0;
    let mut within_ss = 0.0;
    for g in &groups {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        between_ss += g.len() as f64 * (mean - grand).powi(2);
        within_ss += g.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    }
    let total_ss = groups
        .iter()
        .flat_map(|g| g.iter())
        .map(|v| (v - grand).powi(2))
        .sum();
    Ok(VarianceSplit {
        between_ss,
        within_ss,
        total_ss,
        between_sd: (between_ss / n as f64).sqrt(),
        within_sd: (within_ss / n as f64).sqrt(),
        groups: groups.len(),
        n,
    })
}
