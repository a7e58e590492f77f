//! Generalized extreme value (Fisher–Tippett) fitting.
//!
//! `F(x) = exp(−(1 + ξ (x − μ)/σ)^(−1/ξ))`, with the Gumbel limit at ξ = 0.
//! ξ < 0 has a finite upper endpoint (Weibull, type III), ξ > 0 a heavy
//! upper tail (Fréchet, type II).

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::minimize::nelder_mead;
use super::{check_finite, distinct_count, ks_statistic, StatsError};

/// Half-width of the shape band classified as Gumbel.
pub const TAIL_EPSILON: f64 = 0.02;

/// Minimum number of distinct values accepted by [`fit_gev`].
pub const MIN_DISTINCT: usize = 20;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Shapes closer to zero than this use the Gumbel formulas.
const GUMBEL_LIMIT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevParams {
    pub location: f64,
    pub scale: f64,
    pub shape: f64,
}

impl GevParams {
    pub fn gumbel(location: f64, scale: f64) -> Self {
        Self {
            location,
            scale,
            shape: 0.0,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.location) / self.scale;
        if self.shape.abs() < GUMBEL_LIMIT {
            return (-(-z).exp()).exp();
        }
        let t = 1.0 + self.shape * z;
        if t <= 0.0 {
            return if self.shape > 0.0 { 0.0 } else { 1.0 };
        }
        (-t.powf(-1.0 / self.shape)).exp()
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let z = (x - self.location) / self.scale;
        if self.shape.abs() < GUMBEL_LIMIT {
            return -self.scale.ln() - z - (-z).exp();
        }
        let t = 1.0 + self.shape * z;
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        -self.scale.ln() - (1.0 + 1.0 / self.shape) * t.ln() - t.powf(-1.0 / self.shape)
    }

    /// Inverse CDF for `q` in (0, 1).
    pub fn quantile(&self, q: f64) -> f64 {
        let y = -q.ln();
        if self.shape.abs() < GUMBEL_LIMIT {
            self.location - self.scale * y.ln()
        } else {
            self.location + self.scale / self.shape * (y.powf(-self.shape) - 1.0)
        }
    }

    /// Finite upper endpoint `μ − σ/ξ` for ξ < 0.
    pub fn upper_endpoint(&self) -> Option<f64> {
        (self.shape < 0.0).then(|| self.location - self.scale / self.shape)
    }
}

/// Whether the sample is a set of maxima (fitted as is) or minima (fitted
/// after negation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Maxima,
    Minima,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tail {
    WeibullIII,
    GumbelI,
    FrechetII,
}

impl Tail {
    pub fn classify(shape: f64) -> Self {
        if shape < -TAIL_EPSILON {
            Tail::WeibullIII
        } else if shape > TAIL_EPSILON {
            Tail::FrechetII
        } else {
            Tail::GumbelI
        }
    }
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tail::WeibullIII => "Weibull-III",
            Tail::GumbelI => "Gumbel-I",
            Tail::FrechetII => "Frechet-II",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevFit {
    /// Parameters of the fitted distribution of the (possibly negated) sample.
    pub params: GevParams,
    pub orientation: Orientation,
    pub tail: Tail,
    /// The shape lies within two asymptotic standard errors of a class
    /// boundary.
    pub uncertain: bool,
    /// Kolmogorov–Smirnov distance against the original sample.
    pub ks: f64,
    pub n: usize,
    pub refined: bool,
}

impl GevFit {
    /// CDF of the original (un-negated) variable.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.orientation {
            Orientation::Maxima => self.params.cdf(x),
            Orientation::Minima => 1.0 - self.params.cdf(-x),
        }
    }

    /// Quantile of the original variable.
    pub fn quantile(&self, q: f64) -> f64 {
        match self.orientation {
            Orientation::Maxima => self.params.quantile(q),
            Orientation::Minima => -self.params.quantile(1.0 - q),
        }
    }
}

/// Sample L-moments λ1, λ2 and the L-skewness τ3 from probability-weighted
/// moments of the ordered sample.
pub(crate) fn l_moments(values: &[f64]) -> (f64, f64, f64) {
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let (mut b0, mut b1, mut b2) = (0.0, 0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let i = i as f64;
        b0 += v;
        b1 += v * i / (n - 1.0);
        b2 += v * i * (i - 1.0) / ((n - 1.0) * (n - 2.0));
    }
    b0 /= n;
    b1 /= n;
    b2 /= n;
    let l1 = b0;
    let l2 = 2.0 * b1 - b0;
    let l3 = 6.0 * b2 - 6.0 * b1 + b0;
    (l1, l2, l3 / l2)
}

/// L-moment estimator with Hosking's rational approximation for the shape.
fn gev_from_l_moments(values: &[f64]) -> GevParams {
    let (l1, l2, t3) = l_moments(values);
    let c = 2.0 / (3.0 + t3) - 2f64.ln() / 3f64.ln();
    // Hosking's k is −ξ.
    let k = 7.8590 * c + 2.9554 * c * c;
    if k.abs() < GUMBEL_LIMIT {
        let scale = l2 / 2f64.ln();
        return GevParams::gumbel(l1 - EULER_GAMMA * scale, scale);
    }
    let g = gamma(1.0 + k);
    let scale = l2 * k / ((1.0 - 2f64.powf(-k)) * g);
    GevParams {
        location: l1 - scale * (1.0 - g) / k,
        scale,
        shape: -k,
    }
}

fn refine_mle(values: &[f64], start: GevParams) -> GevParams {
    let nll = |p: &[f64]| {
        let params = GevParams {
            location: p[0],
            scale: p[1].exp(),
            shape: p[2],
        };
        let ll: f64 = values.iter().map(|&x| params.ln_pdf(x)).sum();
        if ll.is_finite() {
            -ll
        } else {
            f64::INFINITY
        }
    };
    let x0 = [start.location, start.scale.ln(), start.shape];
    let best = nelder_mead(nll, &x0, &[0.1 * start.scale, 0.1, 0.05], 4000, 1e-12);
    let refined = GevParams {
        location: best[0],
        scale: best[1].exp(),
        shape: best[2],
    };
    if nll(&best) <= nll(&x0) {
        refined
    } else {
        start
    }
}

/// Fits a GEV by L-moments, optionally refined by maximum likelihood.
pub fn fit_gev(values: &[f64], orientation: Orientation, refine: bool) -> Result<GevFit, StatsError> {
    check_finite(values)?;
    let distinct = distinct_count(values);
    if distinct < MIN_DISTINCT {
        return Err(StatsError::DegenerateSample(format!(
            "{distinct} distinct values, need at least {MIN_DISTINCT}"
        )));
    }
    let oriented: Vec<f64> = match orientation {
        Orientation::Maxima => values.to_vec(),
        Orientation::Minima => values.iter().map(|v| -v).collect(),
    };
    let mut params = gev_from_l_moments(&oriented);
    if !(params.scale > 0.0 && params.scale.is_finite() && params.location.is_finite()) {
        return Err(StatsError::DegenerateSample("L-moment estimate failed".into()));
    }
    if refine {
        params = refine_mle(&oriented, params);
    }
    let tail = Tail::classify(params.shape);
    // Asymptotic variance of the L-moment shape estimate near ξ = 0.
    let se = (0.5633 / values.len() as f64).sqrt();
    let uncertain = (params.shape.abs() - TAIL_EPSILON).abs() < 2.0 * se;
    let mut fit = GevFit {
        params,
        orientation,
        tail,
        uncertain,
        ks: 0.0,
        n: values.len(),
        refined: refine,
    };
    fit.ks = ks_statistic(values, |x| fit.cdf(x));
    Ok(fit)
}

/// The fitted distribution's quantile at `q`.
pub fn lottery(fit: &GevFit, q: f64) -> Result<f64, StatsError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(StatsError::InvalidArgument(format!("quantile level {q} not in (0, 1)")));
    }
    Ok(fit.quantile(q))
}

/// Lucky (upper) and unlucky (lower) quantile thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LotteryReport {
    pub lucky: Vec<(f64, f64)>,
    pub unlucky: Vec<(f64, f64)>,
}

pub const LUCKY_LEVELS: [f64; 3] = [0.90, 0.95, 0.99];
pub const UNLUCKY_LEVELS: [f64; 3] = [0.01, 0.05, 0.10];

pub fn lottery_report(fit: &GevFit) -> LotteryReport {
    let at = |levels: &[f64]| levels.iter().map(|&q| (q, fit.quantile(q))).collect();
    LotteryReport {
        lucky: at(&LUCKY_LEVELS),
        unlucky: at(&UNLUCKY_LEVELS),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Inverse-transform sampling straight from the closed-form quantile,
    /// written independently of `GevParams::quantile`.
    fn sample(mu: f64, sigma: f64, xi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                let e = -u.ln();
                if xi == 0.0 {
                    mu - sigma * e.ln()
                } else {
                    mu + sigma * (e.powf(-xi) - 1.0) / xi
                }
            })
            .collect()
    }

    #[test]
    fn recovers_gumbel() {
        let x = sample(0.0, 1.0, 0.0, 5000, 1);
        let fit = fit_gev(&x, Orientation::Maxima, false).unwrap();
        assert!(fit.params.location.abs() <= 0.05, "{fit:?}");
        assert!((fit.params.scale - 1.0).abs() <= 0.05, "{fit:?}");
        assert!(fit.params.shape.abs() <= 0.05, "{fit:?}");
        assert!(fit.ks < 0.05);
    }

    #[test]
    fn classifies_weibull_and_frechet() {
        let w = fit_gev(&sample(1.0, 0.5, -0.3, 5000, 2), Orientation::Maxima, false).unwrap();
        assert_eq!(w.tail, Tail::WeibullIII);
        assert!(!w.uncertain);
        let f = fit_gev(&sample(1.0, 0.5, 0.3, 5000, 3), Orientation::Maxima, false).unwrap();
        assert_eq!(f.tail, Tail::FrechetII);
    }

    #[test]
    fn mle_refinement_does_not_worsen_likelihood() {
        let x = sample(2.0, 0.7, -0.2, 300, 4);
        let lm = fit_gev(&x, Orientation::Maxima, false).unwrap();
        let ml = fit_gev(&x, Orientation::Maxima, true).unwrap();
        let ll = |p: &GevParams| x.iter().map(|&v| p.ln_pdf(v)).sum::<f64>();
        assert!(ll(&ml.params) >= ll(&lm.params));
        assert!((ml.params.shape + 0.2).abs() < 0.15);
    }

    #[test]
    fn minima_orientation_mirrors_maxima() {
        let x = sample(0.0, 1.0, -0.2, 2000, 5);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let max_fit = fit_gev(&x, Orientation::Maxima, false).unwrap();
        let min_fit = fit_gev(&neg, Orientation::Minima, false).unwrap();
        assert!((max_fit.params.shape - min_fit.params.shape).abs() < 1e-12);
        assert!((min_fit.quantile(0.1) + max_fit.quantile(0.9)).abs() < 1e-9);
        assert!((min_fit.ks - max_fit.ks).abs() < 1e-9);
    }

    #[test]
    fn gumbel_median() {
        let fit = GevFit {
            params: GevParams::gumbel(0.0, 1.0),
            orientation: Orientation::Maxima,
            tail: Tail::GumbelI,
            uncertain: false,
            ks: 0.0,
            n: 0,
            refined: false,
        };
        // μ − σ ln ln 2
        assert!((lottery(&fit, 0.5).unwrap() - 0.366_512_920_581_664_3).abs() < 1e-12);
        assert!(lottery(&fit, 0.0).is_err());
        assert!(lottery(&fit, 1.0).is_err());
    }

    #[test]
    fn weibull_quantiles_stay_below_endpoint() {
        let p = GevParams { location: 0.9, scale: 0.05, shape: -0.4 };
        let end = p.upper_endpoint().unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 1..1000 {
            let q = p.quantile(i as f64 / 1000.0);
            assert!(q > prev && q <= end);
            prev = q;
        }
        assert!(p.quantile(1.0 - 1e-12) <= end);
    }

    #[test]
    fn constant_sample_is_degenerate() {
        assert!(matches!(
            fit_gev(&[0.7; 46], Orientation::Maxima, false),
            Err(StatsError::DegenerateSample(_))
        ));
    }

    #[test]
    fn shape_is_affine_invariant() {
        let x = sample(0.3, 0.2, 0.1, 1000, 6);
        let y: Vec<f64> = x.iter().map(|v| 7.5 * v - 3.0).collect();
        let a = fit_gev(&x, Orientation::Maxima, false).unwrap();
        let b = fit_gev(&y, Orientation::Maxima, false).unwrap();
        assert!((a.params.shape - b.params.shape).abs() < 0.02);
        assert_eq!(a.tail, b.tail);
    }

    #[test]
    fn l_moments_of_small_sample() {
        // Hand computation for {1, 2, 4}: b0 = 7/3, b1 = 5/3, b2 = 4/3;
        // λ2 = 1, λ3 = 1/3.
        let (l1, l2, t3) = l_moments(&[4.0, 1.0, 2.0]);
        assert!((l1 - 7.0 / 3.0).abs() < 1e-15);
        assert!((l2 - 1.0).abs() < 1e-15);
        assert!((t3 - 1.0 / 3.0).abs() < 1e-14);
    }
}
