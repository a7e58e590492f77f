//! De Jong's F1–F5 test functions, and a real-coded GA over them that reuses
//! the selection/survival engine.
//!
//! | fn | name               | dim | domain              | minimum            |
//! |----|--------------------|-----|---------------------|--------------------|
//! | F1 | sphere             | 3   | [−5.12, 5.12]       | 0 at 0             |
//! | F2 | Rosenbrock         | 2   | [−2.048, 2.048]     | 0 at (1, 1)        |
//! | F3 | step Σ⌊xᵢ⌋         | 5   | [−5.12, 5.12]       | −30 on [−5.12, −5) |
//! | F4 | quartic + N(0, 1)  | 30  | [−1.28, 1.28]       | noise around 0     |
//! | F5 | Shekel's foxholes  | 2   | [−65.536, 65.536]   | ≈ 0.998 at (−32, −32) |
//!
//! The GA maximizes the negated function value.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ga::{run_problem, GaConfig, GaError, GaRng, Genome, Problem, RunRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("{function} takes {expected} coordinates, got {found}")]
    DimensionMismatch {
        function: DeJong,
        expected: usize,
        found: usize,
    },
    #[error("coordinate {index} = {value} lies outside [{lo}, {hi}]")]
    OutOfBounds { index: usize, value: f64, lo: f64, hi: f64 },
    #[error("unknown function `{0}` (expected F1..F5)")]
    UnknownFunction(String),
    #[error(transparent)]
    Ga(#[from] GaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeJong {
    F1,
    F2,
    F3,
    F4,
    F5,
}

impl DeJong {
    pub const ALL: [DeJong; 5] = [DeJong::F1, DeJong::F2, DeJong::F3, DeJong::F4, DeJong::F5];

    pub fn dimension(self) -> usize {
        match self {
            DeJong::F1 => 3,
            DeJong::F2 => 2,
            DeJong::F3 => 5,
            DeJong::F4 => 30,
            DeJong::F5 => 2,
        }
    }

    /// Symmetric box bound, identical for every coordinate.
    pub fn bound(self) -> f64 {
        match self {
            DeJong::F1 | DeJong::F3 => 5.12,
            DeJong::F2 => 2.048,
            DeJong::F4 => 1.28,
            DeJong::F5 => 65.536,
        }
    }
}

impl fmt::Display for DeJong {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", *self as u8 + 1)
    }
}

impl FromStr for DeJong {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "F1" | "f1" => Ok(DeJong::F1),
            "F2" | "f2" => Ok(DeJong::F2),
            "F3" | "f3" => Ok(DeJong::F3),
            "F4" | "f4" => Ok(DeJong::F4),
            "F5" | "f5" => Ok(DeJong::F5),
            other => Err(BenchError::UnknownFunction(other.to_string())),
        }
    }
}

/// A point in a function's box domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealGenotype {
    pub values: Vec<f64>,
}

impl Genome for RealGenotype {
    fn tie_cmp(&self, other: &Self) -> Ordering {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| self.values.len().cmp(&other.values.len()))
    }

    fn census_key(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.to_bits()).collect()
    }
}

fn shekel_centers() -> impl Iterator<Item = (f64, f64)> {
    const A: [f64; 5] = [-32.0, -16.0, 0.0, 16.0, 32.0];
    (0..25).map(|j| (A[j % 5], A[j / 5]))
}

/// Evaluates `f` at `x`. Only F4 draws from `rng` (one standard normal).
pub fn eval_dejong<R: Rng + ?Sized>(f: DeJong, x: &[f64], rng: &mut R) -> Result<f64, BenchError> {
    if x.len() != f.dimension() {
        return Err(BenchError::DimensionMismatch {
            function: f,
            expected: f.dimension(),
            found: x.len(),
        });
    }
    let b = f.bound();
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, v)| !(v.abs() <= b)) {
        return Err(BenchError::OutOfBounds {
            index,
            value,
            lo: -b,
            hi: b,
        });
    }
    Ok(match f {
        DeJong::F1 => x.iter().map(|v| v * v).sum(),
        DeJong::F2 => 100.0 * (x[0] * x[0] - x[1]).powi(2) + (1.0 - x[0]).powi(2),
        DeJong::F3 => x.iter().map(|v| v.floor()).sum(),
        DeJong::F4 => {
            let quartic: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| (i + 1) as f64 * v.powi(4))
                .sum();
            let noise: f64 = StandardNormal.sample(rng);
            quartic + noise
        }
        DeJong::F5 => {
            let s: f64 = shekel_centers()
                .enumerate()
                .map(|(j, (a1, a2))| 1.0 / ((j + 1) as f64 + (x[0] - a1).powi(6) + (x[1] - a2).powi(6)))
                .sum();
            1.0 / (1.0 / 500.0 + s)
        }
    })
}

/// Real-coded variation operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealOperators {
    /// BLX-α extension of the parents' interval on each side.
    pub blend_alpha: f64,
    /// Gaussian mutation standard deviation as a fraction of the domain width.
    pub mutation_scale: f64,
}

impl Default for RealOperators {
    fn default() -> Self {
        Self {
            blend_alpha: 0.5,
            mutation_scale: 0.1,
        }
    }
}

pub struct DeJongProblem {
    pub function: DeJong,
    pub operators: RealOperators,
}

impl DeJongProblem {
    fn clip(&self, v: f64) -> f64 {
        let b = self.function.bound();
        v.clamp(-b, b)
    }
}

impl Problem for DeJongProblem {
    type Genome = RealGenotype;

    fn random_genome(&self, rng: &mut GaRng) -> RealGenotype {
        let b = self.function.bound();
        RealGenotype {
            values: (0..self.function.dimension())
                .map(|_| rng.random_range(-b..=b))
                .collect(),
        }
    }

    fn crossover(
        &self,
        a: &RealGenotype,
        b: &RealGenotype,
        rate: f64,
        rng: &mut GaRng,
    ) -> (RealGenotype, RealGenotype) {
        if !rng.random_bool(rate) {
            return (a.clone(), b.clone());
        }
        let alpha = self.operators.blend_alpha;
        let mut child = || RealGenotype {
            values: a
                .values
                .iter()
                .zip(&b.values)
                .map(|(&x, &y)| {
                    let (lo, hi) = (x.min(y), x.max(y));
                    let d = hi - lo;
                    let u: f64 = rng.random();
                    self.clip(lo - alpha * d + u * (1.0 + 2.0 * alpha) * d)
                })
                .collect(),
        };
        let c1 = child();
        let c2 = child();
        (c1, c2)
    }

    fn mutate(&self, g: &RealGenotype, rate: f64, rng: &mut GaRng) -> RealGenotype {
        let sd = self.operators.mutation_scale * 2.0 * self.function.bound();
        RealGenotype {
            values: g
                .values
                .iter()
                .map(|&v| {
                    if rng.random_bool(rate) {
                        let z: f64 = StandardNormal.sample(rng);
                        self.clip(v + sd * z)
                    } else {
                        v
                    }
                })
                .collect(),
        }
    }

    fn evaluate(&mut self, g: &RealGenotype, rng: &mut GaRng) -> f64 {
        -eval_dejong(self.function, &g.values, rng).expect("genomes stay inside the domain")
    }
}

/// Minimizes `f` with the GA. Fitness in the record is the negated function
/// value; `config.k` is ignored.
pub fn run_real(
    f: DeJong,
    config: &GaConfig,
    operators: RealOperators,
) -> Result<RunRecord<RealGenotype>, BenchError> {
    let mut problem = DeJongProblem {
        function: f,
        operators,
    };
    Ok(run_problem(&mut problem, config, |_, _| {})?)
}
