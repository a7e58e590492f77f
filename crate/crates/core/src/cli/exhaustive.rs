use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dataset::Dataset;
use crate::regress::fit_mlr;

/// Largest number of subsets `cmd_exhaustive` will enumerate.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimumReport {
    pub k: usize,
    /// Best r² over all k-subsets.
    pub optimum: f64,
    /// The lexicographically first subset attaining `optimum`.
    pub indices: Vec<usize>,
    pub evaluated: u64,
}

fn binomial(m: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// Advances `idx` to the next k-subset of `0..m` in lexicographic order.
fn next_subset(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Fits every k-subset and returns the best. Unfittable subsets score 0, as
/// they do in the GA.
pub fn cmd_exhaustive(data: &Dataset, k: usize) -> Result<OptimumReport, CliError> {
    let m = data.n_descriptors();
    if k < 1 || k > m {
        return Err(CliError::Usage(format!("k={k} must lie in 1..={m}")));
    }
    let count = binomial(m, k);
    if count > ENUMERATION_LIMIT as f64 {
        return Err(CliError::EnumerationTooLarge {
            m,
            k,
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = (f64::NEG_INFINITY, idx.clone());
    let mut evaluated = 0u64;
    loop {
        let r2 = fit_mlr(data, &idx).map(|f| f.r2).unwrap_or(0.0);
        evaluated += 1;
        if r2 > best.0 {
            best = (r2, idx.clone());
        }
        if !next_subset(&mut idx, m) {
            break;
        }
    }
    Ok(OptimumReport {
        k,
        optimum: best.0,
        indices: best.1,
        evaluated,
    })
}
