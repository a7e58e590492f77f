//! Log-Pearson type III fits.
//!
//! The one-parameter form models values in (0, 1] through `z = −ln x ≥ 0`,
//! with `z ~ Gamma(shape α, scale θ)`, location fixed at 0 and `θ = mean(z)/α`
//! so the fitted mean of the log always equals the sample mean. Only α is
//! free; it is estimated by maximum likelihood (moments when some `z` is 0).
//!
//! The three-parameter form is the classical method-of-moments fit of a
//! Pearson III to `ln x` (mean, standard deviation, skew).

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{digamma, gamma_lr};

use super::{check_finite, distinct_count, ks_statistic, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lp3Method {
    MaximumLikelihood,
    Moments,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lp3Fit {
    /// Gamma shape α of `−ln x`.
    pub shape: f64,
    /// Gamma scale, tied to the sample: `mean(−ln x) / α`.
    pub scale: f64,
    pub method: Lp3Method,
    pub ks: f64,
    pub n: usize,
}

impl Lp3Fit {
    /// P(X ≤ x) for x in (0, 1].
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        1.0 - gamma_lr(self.shape, -x.ln() / self.scale)
    }
}

/// Solves `ln α − ψ(α) = s` for `s > 0`; the left side decreases from +∞ to 0.
fn gamma_shape_mle(s: f64) -> f64 {
    let g = |a: f64| a.ln() - digamma(a) - s;
    let (mut lo, mut hi) = (1e-10f64, 1e10f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-14 {
            break;
        }
    }
    (lo * hi).sqrt()
}

pub fn fit_lp3(values: &[f64]) -> Result<Lp3Fit, StatsError> {
    check_finite(values)?;
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v <= 0.0) {
        return Err(StatsError::NonPositiveValue { index, value });
    }
    if let Some(v) = values.iter().find(|&&v| v > 1.0) {
        return Err(StatsError::InvalidArgument(format!("value {v} exceeds 1")));
    }
    if distinct_count(values) < 2 {
        return Err(StatsError::DegenerateSample("all values equal".into()));
    }
    let z: Vec<f64> = values.iter().map(|v| -v.ln()).collect();
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;

    let (shape, method) = if z.iter().all(|&t| t > 0.0) {
        let mean_ln = z.iter().map(|t| t.ln()).sum::<f64>() / n;
        (gamma_shape_mle(mean.ln() - mean_ln), Lp3Method::MaximumLikelihood)
    } else {
        let var = z.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
        (mean * mean / var, Lp3Method::Moments)
    };
    let mut fit = Lp3Fit {
        shape,
        scale: mean / shape,
        method,
        ks: 0.0,
        n: values.len(),
    };
    fit.ks = ks_statistic(values, |x| fit.cdf(x));
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lp3FullFit {
    pub mean_log: f64,
    pub sd_log: f64,
    pub skew_log: f64,
    pub ks: f64,
    pub n: usize,
}

impl Lp3FullFit {
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let y = x.ln();
        let g = self.skew_log;
        if g.abs() < 1e-6 {
            let z = (y - self.mean_log) / self.sd_log;
            return 0.5 * erfc(-z / std::f64::consts::SQRT_2);
        }
        let alpha = 4.0 / (g * g);
        let beta = self.sd_log * g / 2.0;
        let origin = self.mean_log - 2.0 * self.sd_log / g;
        let t = (y - origin) / beta;
        if t <= 0.0 {
            return if g > 0.0 { 0.0 } else { 1.0 };
        }
        let p = gamma_lr(alpha, t);
        if g > 0.0 {
            p
        } else {
            1.0 - p
        }
    }
}

/// Method-of-moments Pearson III on the logarithms of positive values.
pub fn fit_lp3_full(values: &[f64]) -> Result<Lp3FullFit, StatsError> {
    check_finite(values)?;
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v <= 0.0) {
        return Err(StatsError::NonPositiveValue { index, value });
    }
    if values.len() < 3 || distinct_count(values) < 3 {
        return Err(StatsError::DegenerateSample("need at least 3 distinct values".into()));
    }
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let m2 = y.iter().map(|t| (t - mean).powi(2)).sum::<f64>();
    let m3 = y.iter().map(|t| (t - mean).powi(3)).sum::<f64>();
    let sd = (m2 / (n - 1.0)).sqrt();
    // Bias-adjusted sample skew.
    let skew = n * m3 / ((n - 1.0) * (n - 2.0) * sd.powi(3));
    let mut fit = Lp3FullFit {
        mean_log: mean,
        sd_log: sd,
        skew_log: skew,
        ks: 0.0,
        n: values.len(),
    };
    fit.ks = ks_statistic(values, |x| fit.cdf(x));
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Inverse-transform sampler for the one-parameter model with α = 2:
    /// Gamma(2, 1) has CDF 1 − e^{−z}(1 + z), inverted by bisection.
    fn sample_alpha2(theta: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let (mut lo, mut hi) = (0.0f64, 100.0f64);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if 1.0 - (-mid).exp() * (1.0 + mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (-theta * 0.5 * (lo + hi)).exp()
            })
            .collect()
    }

    #[test]
    fn recovers_alpha_two() {
        let x = sample_alpha2(0.3, 5000, 10);
        let fit = fit_lp3(&x).unwrap();
        assert_eq!(fit.method, Lp3Method::MaximumLikelihood);
        assert!((fit.shape - 2.0).abs() <= 0.15, "{fit:?}");
        assert!((fit.scale - 0.3).abs() <= 0.03, "{fit:?}");
        assert!(fit.ks < 0.03);
    }

    #[test]
    fn shape_solver_inverts_its_equation() {
        for a in [0.05f64, 0.5, 2.0, 40.0] {
            let s = a.ln() - digamma(a);
            assert!((gamma_shape_mle(s) / a - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn value_of_one_falls_back_to_moments() {
        let mut x = sample_alpha2(0.3, 200, 11);
        x.push(1.0);
        let fit = fit_lp3(&x).unwrap();
        assert_eq!(fit.method, Lp3Method::Moments);
        assert!(fit.shape > 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(fit_lp3(&[0.5, 0.0, 0.2]), Err(StatsError::NonPositiveValue { index: 1, .. })));
        assert!(matches!(fit_lp3(&[0.4; 10]), Err(StatsError::DegenerateSample(_))));
        assert!(matches!(fit_lp3(&[0.4, 1.5]), Err(StatsError::InvalidArgument(_))));
    }

    #[test]
    fn full_fit_matches_one_parameter_data() {
        // ln x = −θ z with z ~ Gamma(2): skew of ln x is −2/√2.
        let x = sample_alpha2(0.3, 20_000, 12);
        let full = fit_lp3_full(&x).unwrap();
        assert!((full.skew_log + 2f64.sqrt()).abs() < 0.1, "{full:?}");
        assert!((full.mean_log + 0.6).abs() < 0.02);
        assert!(full.ks < 0.02);
    }
}
