//! The classical generational GA: genotypes of distinct descriptor indices,
//! three selection rules, three survival rules, one-point crossover and
//! gene-replacement mutation.

mod engine;
pub mod log;
mod operators;
mod select;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use engine::{run, run_observed, run_problem, Census, Problem, RegressionProblem, RunRecord};
pub use operators::{crossover, evaluate, mutate, random_genotype};
pub use select::{select_parents, survive};

/// The run-local random stream. ChaCha8 keeps seeded output stable across
/// platforms and releases.
pub type GaRng = rand_chacha::ChaCha8Rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaError {
    #[error("empty population")]
    EmptyPopulation,
    #[error("parents ({parents}) and offspring ({offspring}) differ in size")]
    SizeMismatch { parents: usize, offspring: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown strategy `{0}` (expected one of PP PD PT DP DD DT TP TD TT)")]
    UnknownStrategy(String),
}

/// One of the three families used both for parent selection and survival.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    /// Fitness-proportional (roulette wheel).
    Proportional,
    /// Truncation to the best.
    Deterministic,
    /// Best of a uniformly drawn tournament.
    Tournament,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [
        StrategyKind::Proportional,
        StrategyKind::Deterministic,
        StrategyKind::Tournament,
    ];

    pub fn letter(self) -> char {
        match self {
            StrategyKind::Proportional => 'P',
            StrategyKind::Deterministic => 'D',
            StrategyKind::Tournament => 'T',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'P' => Some(StrategyKind::Proportional),
            'D' => Some(StrategyKind::Deterministic),
            'T' => Some(StrategyKind::Tournament),
            _ => None,
        }
    }
}

/// A selection rule paired with a survival rule, written as two letters
/// (`DT` = deterministic selection, tournament survival).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StrategyPair {
    pub selection: StrategyKind,
    pub survival: StrategyKind,
}

impl StrategyPair {
    pub const fn new(selection: StrategyKind, survival: StrategyKind) -> Self {
        Self {
            selection,
            survival,
        }
    }

    /// All nine pairs in selection-major order: PP PD PT DP DD DT TP TD TT.
    pub fn all() -> [StrategyPair; 9] {
        let mut out = [StrategyPair::new(StrategyKind::Proportional, StrategyKind::Proportional); 9];
        for (i, sel) in StrategyKind::ALL.into_iter().enumerate() {
            for (j, sur) in StrategyKind::ALL.into_iter().enumerate() {
                out[i * 3 + j] = StrategyPair::new(sel, sur);
            }
        }
        out
    }
}

impl fmt::Display for StrategyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.selection.letter(), self.survival.letter())
    }
}

impl FromStr for StrategyPair {
    type Err = GaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (
            chars.next().and_then(StrategyKind::from_letter),
            chars.next().and_then(StrategyKind::from_letter),
            chars.next(),
        ) {
            (Some(selection), Some(survival), None) => Ok(Self {
                selection,
                survival,
            }),
            _ => Err(GaError::UnknownStrategy(s.to_string())),
        }
    }
}

impl TryFrom<String> for StrategyPair {
    type Error = GaError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<StrategyPair> for String {
    fn from(p: StrategyPair) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    /// Genes per genotype.
    pub k: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub strategy: StrategyPair,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            k: 2,
            generations: 1000,
            crossover_rate: 0.8,
            mutation_rate: 0.05,
            tournament_size: 2,
            strategy: StrategyPair::new(StrategyKind::Deterministic, StrategyKind::Tournament),
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |msg: String| Err(GaError::InvalidConfig(msg));
        if self.population_size < 4 || self.population_size % 2 != 0 {
            return bad(format!(
                "population_size must be even and ≥ 4, got {}",
                self.population_size
            ));
        }
        if self.k < 1 {
            return bad("k must be ≥ 1".into());
        }
        if self.generations < 1 {
            return bad("generations must be ≥ 1".into());
        }
        for (name, r) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("{name} must lie in [0, 1], got {r}"));
            }
        }
        if self.tournament_size < 2 {
            return bad(format!(
                "tournament_size must be ≥ 2, got {}",
                self.tournament_size
            ));
        }
        Ok(())
    }
}

/// An ordered list of distinct descriptor indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Genotype {
    pub genes: Vec<usize>,
}

impl Genotype {
    pub fn new(genes: Vec<usize>) -> Self {
        Self { genes }
    }

    pub fn sorted_genes(&self) -> Vec<usize> {
        let mut g = self.genes.clone();
        g.sort_unstable();
        g
    }

    /// True when every gene is distinct and below `m`.
    pub fn is_valid(&self, m: usize) -> bool {
        let s = self.sorted_genes();
        s.iter().all(|&g| g < m) && s.windows(2).all(|w| w[0] != w[1])
    }
}

/// What the engine needs from a genome beyond cloning: a deterministic
/// tie-break order and a hashable identity for census counts.
pub trait Genome: Clone + fmt::Debug + Serialize {
    fn tie_cmp(&self, other: &Self) -> Ordering;
    fn census_key(&self) -> Vec<u64>;
}

impl Genome for Genotype {
    /// Lexicographic on the sorted gene list, then on the raw order.
    fn tie_cmp(&self, other: &Self) -> Ordering {
        self.sorted_genes()
            .cmp(&other.sorted_genes())
            .then_with(|| self.genes.cmp(&other.genes))
    }

    fn census_key(&self) -> Vec<u64> {
        self.genes.iter().map(|&g| g as u64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual<G = Genotype> {
    pub genotype: G,
    pub fitness: f64,
}

/// Ordering used by every rule: higher fitness first, then the genome
/// tie-break.
pub trait Ranked {
    fn fitness(&self) -> f64;
    fn tie_cmp(&self, other: &Self) -> Ordering;

    fn rank_cmp(&self, other: &Self) -> Ordering {
        other
            .fitness()
            .total_cmp(&self.fitness())
            .then_with(|| self.tie_cmp(other))
    }
}

impl<G: Genome> Ranked for Individual<G> {
    fn fitness(&self) -> f64 {
        self.fitness
    }
    fn tie_cmp(&self, other: &Self) -> Ordering {
        self.genotype.tie_cmp(&other.genotype)
    }
}
