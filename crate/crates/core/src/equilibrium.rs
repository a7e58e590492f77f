//! Selection-free dynamics of fixed-length strings over a finite alphabet.
//!
//! Repeated mutation drives every string toward proportion `1/C^L`. Repeated
//! recombination leaves per-locus allele frequencies untouched and drives
//! string proportions toward the product of the initial allele proportions
//! (linkage equilibrium). Both together converge to `1/C^L`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

/// Largest `C^L` for which string proportions are tabulated.
pub const MAX_STRING_SPACE: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("recombination needs an even population, got {0}")]
    OddPopulation(usize),
    #[error("invalid population: {0}")]
    InvalidPopulation(String),
    #[error("rate {0} is not a probability")]
    InvalidRate(f64),
    #[error("unknown mode `{0}` (expected mutation, recombination or both)")]
    UnknownMode(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllelePopulation {
    cardinality: usize,
    length: usize,
    /// Row-major: string `i` occupies `symbols[i*L..(i+1)*L]`.
    symbols: Vec<u32>,
}

impl AllelePopulation {
    pub fn new(cardinality: usize, strings: &[Vec<u32>]) -> Result<Self, EquilibriumError> {
        let length = strings.first().map_or(0, Vec::len);
        let bad = |m: String| Err(EquilibriumError::InvalidPopulation(m));
        if cardinality < 2 {
            return bad(format!("alphabet size {cardinality} < 2"));
        }
        if length < 1 {
            return bad("strings must have at least one locus".into());
        }
        let space = (cardinality as f64).powi(length as i32);
        if space > MAX_STRING_SPACE as f64 {
            return bad(format!("C^L = {space} exceeds {MAX_STRING_SPACE}"));
        }
        let mut symbols = Vec::with_capacity(strings.len() * length);
        for (i, s) in strings.iter().enumerate() {
            if s.len() != length {
                return bad(format!("string {i} has length {}, expected {length}", s.len()));
            }
            if let Some(&a) = s.iter().find(|&&a| a as usize >= cardinality) {
                return bad(format!("string {i} has symbol {a} ≥ {cardinality}"));
            }
            symbols.extend_from_slice(s);
        }
        Ok(Self {
            cardinality,
            length,
            symbols,
        })
    }

    /// `size` copies of one string.
    pub fn filled(cardinality: usize, string: &[u32], size: usize) -> Result<Self, EquilibriumError> {
        Self::new(cardinality, &vec![string.to_vec(); size])
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn size(&self) -> usize {
        self.symbols.len() / self.length
    }

    pub fn string(&self, i: usize) -> &[u32] {
        &self.symbols[i * self.length..(i + 1) * self.length]
    }

    /// Number of possible strings, `C^L`.
    pub fn string_space(&self) -> usize {
        self.cardinality.pow(self.length as u32)
    }

    /// Index of a string in `0..C^L`, locus 0 most significant.
    pub fn string_index(&self, s: &[u32]) -> usize {
        s.iter().fold(0, |acc, &a| acc * self.cardinality + a as usize)
    }

    /// Symbols of string number `index` (inverse of [`Self::string_index`]).
    pub fn string_of(&self, mut index: usize) -> Vec<u32> {
        let mut s = vec![0; self.length];
        for slot in s.iter_mut().rev() {
            *slot = (index % self.cardinality) as u32;
            index /= self.cardinality;
        }
        s
    }

    /// `counts[locus][symbol]`.
    pub fn allele_counts(&self) -> Vec<Vec<usize>> {
        let mut counts = vec![vec![0; self.cardinality]; self.length];
        for s in self.symbols.chunks_exact(self.length) {
            for (locus, &a) in s.iter().enumerate() {
                counts[locus][a as usize] += 1;
            }
        }
        counts
    }

    pub fn allele_proportions(&self) -> Vec<Vec<f64>> {
        let p = self.size() as f64;
        self.allele_counts()
            .into_iter()
            .map(|row| row.into_iter().map(|c| c as f64 / p).collect())
            .collect()
    }

    /// Proportion of each of the `C^L` strings.
    pub fn string_proportions(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.string_space()];
        for s in self.symbols.chunks_exact(self.length) {
            counts[self.string_index(s)] += 1;
        }
        let p = self.size() as f64;
        counts.into_iter().map(|c| c as f64 / p).collect()
    }

    fn mutate_in_place<R: Rng + ?Sized>(&mut self, rate: f64, rng: &mut R) {
        let c = self.cardinality as u32;
        for a in &mut self.symbols {
            if rng.random::<f64>() < rate {
                *a = rng.random_range(0..c);
            }
        }
    }

    fn recombine_in_place<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let l = self.length;
        let mut order: Vec<usize> = (0..self.size()).collect();
        order.shuffle(rng);
        for pair in order.chunks_exact(2) {
            let (i, j) = (pair[0] * l, pair[1] * l);
            for locus in 0..l {
                if rng.random_bool(0.5) {
                    self.symbols.swap(i + locus, j + locus);
                }
            }
        }
    }
}

fn check_rate(rate: f64) -> Result<(), EquilibriumError> {
    if (0.0..=1.0).contains(&rate) {
        Ok(())
    } else {
        Err(EquilibriumError::InvalidRate(rate))
    }
}

/// Every locus of every string independently, with probability `rate`, is
/// redrawn uniformly from the whole alphabet (possibly unchanged).
pub fn step_mutation<R: Rng + ?Sized>(
    pop: &AllelePopulation,
    rate: f64,
    rng: &mut R,
) -> Result<AllelePopulation, EquilibriumError> {
    check_rate(rate)?;
    let mut next = pop.clone();
    next.mutate_in_place(rate, rng);
    Ok(next)
}

/// Pairs strings uniformly at random and applies uniform crossover to each
/// pair.
pub fn step_recombination<R: Rng + ?Sized>(
    pop: &AllelePopulation,
    rng: &mut R,
) -> Result<AllelePopulation, EquilibriumError> {
    if pop.size() % 2 != 0 {
        return Err(EquilibriumError::OddPopulation(pop.size()));
    }
    let mut next = pop.clone();
    next.recombine_in_place(rng);
    Ok(next)
}

/// Recombination followed by mutation.
pub fn step_both<R: Rng + ?Sized>(
    pop: &AllelePopulation,
    rate: f64,
    rng: &mut R,
) -> Result<AllelePopulation, EquilibriumError> {
    check_rate(rate)?;
    let mut next = step_recombination(pop, rng)?;
    next.mutate_in_place(rate, rng);
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Mutation,
    Recombination,
    Both,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Mutation => "mutation",
            Mode::Recombination => "recombination",
            Mode::Both => "both",
        })
    }
}

impl FromStr for Mode {
    type Err = EquilibriumError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mutation" => Ok(Mode::Mutation),
            "recombination" => Ok(Mode::Recombination),
            "both" => Ok(Mode::Both),
            other => Err(EquilibriumError::UnknownMode(other.to_string())),
        }
    }
}

/// The limiting string proportions for `mode` starting from `pop0`.
pub fn equilibrium_limit(pop0: &AllelePopulation, mode: Mode) -> Vec<f64> {
    let space = pop0.string_space();
    match mode {
        Mode::Mutation | Mode::Both => vec![1.0 / space as f64; space],
        Mode::Recombination => {
            let alleles = pop0.allele_proportions();
            (0..space)
                .map(|idx| {
                    pop0.string_of(idx)
                        .iter()
                        .enumerate()
                        .map(|(locus, &a)| alleles[locus][a as usize])
                        .product()
                })
                .collect()
        }
    }
}

/// Max-norm distance between two proportion tables.
pub fn max_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// String proportions at one step of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct StringProportions {
    pub step: usize,
    pub proportions: Vec<f64>,
    /// Max-norm distance to the applicable limit.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mode: Mode,
    pub limit: Vec<f64>,
    /// Per-locus allele proportions of the starting population.
    pub initial_alleles: Vec<Vec<f64>>,
    /// Entries for steps `0..=steps`.
    pub series: Vec<StringProportions>,
    pub final_population: AllelePopulation,
}

impl Trajectory {
    /// Average proportion of each string over steps `from..`.
    pub fn mean_proportions(&self, from: usize) -> Vec<f64> {
        let tail = &self.series[from.min(self.series.len() - 1)..];
        let mut mean = vec![0.0; self.limit.len()];
        for point in tail {
            for (m, p) in mean.iter_mut().zip(&point.proportions) {
                *m += p;
            }
        }
        mean.iter_mut().for_each(|m| *m /= tail.len() as f64);
        mean
    }

    /// `step,distance` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,distance\n");
        for p in &self.series {
            out.push_str(&format!("{},{}\n", p.step, crate::format_real(p.distance)));
        }
        out
    }
}

fn advance<R: Rng + ?Sized>(
    pop: &mut AllelePopulation,
    mode: Mode,
    rate: f64,
    rng: &mut R,
) {
    match mode {
        Mode::Mutation => pop.mutate_in_place(rate, rng),
        Mode::Recombination => pop.recombine_in_place(rng),
        Mode::Both => {
            pop.recombine_in_place(rng);
            pop.mutate_in_place(rate, rng);
        }
    }
}

fn check_mode(pop: &AllelePopulation, mode: Mode, rate: f64) -> Result<(), EquilibriumError> {
    check_rate(rate)?;
    if mode != Mode::Mutation && pop.size() % 2 != 0 {
        return Err(EquilibriumError::OddPopulation(pop.size()));
    }
    Ok(())
}

/// Iterates `mode` for `steps` steps, recording proportions and distance to
/// the limit at every step including the start.
pub fn trajectory<R: Rng + ?Sized>(
    pop0: &AllelePopulation,
    mode: Mode,
    rate: f64,
    steps: usize,
    rng: &mut R,
) -> Result<Trajectory, EquilibriumError> {
    check_mode(pop0, mode, rate)?;
    let limit = equilibrium_limit(pop0, mode);
    let mut pop = pop0.clone();
    let mut series = Vec::with_capacity(steps + 1);
    for step in 0..=steps {
        if step > 0 {
            advance(&mut pop, mode, rate, rng);
        }
        let proportions = pop.string_proportions();
        let distance = max_distance(&proportions, &limit);
        series.push(StringProportions {
            step,
            proportions,
            distance,
        });
    }
    Ok(Trajectory {
        mode,
        limit,
        initial_alleles: pop0.allele_proportions(),
        series,
        final_population: pop,
    })
}

/// First step at which the distance to the limit is at most `threshold`, or
/// `None` within `max_steps`.
pub fn steps_to_within<R: Rng + ?Sized>(
    pop0: &AllelePopulation,
    mode: Mode,
    rate: f64,
    threshold: f64,
    max_steps: usize,
    rng: &mut R,
) -> Result<Option<usize>, EquilibriumError> {
    check_mode(pop0, mode, rate)?;
    let limit = equilibrium_limit(pop0, mode);
    let mut pop = pop0.clone();
    for step in 0..=max_steps {
        if step > 0 {
            advance(&mut pop, mode, rate, rng);
        }
        if max_distance(&pop.string_proportions(), &limit) <= threshold {
            return Ok(Some(step));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn rate_zero_mutation_is_identity() {
        let pop = AllelePopulation::new(3, &[vec![0, 1], vec![2, 2], vec![1, 0]]).unwrap();
        assert_eq!(step_mutation(&pop, 0.0, &mut rng(1)).unwrap(), pop);
    }

    #[test]
    fn recombination_conserves_allele_counts() {
        let strings: Vec<Vec<u32>> = (0..200u32).map(|i| vec![i % 3, (i / 3) % 3, (i * 7) % 3, 0]).collect();
        let mut pop = AllelePopulation::new(3, &strings).unwrap();
        let before = pop.allele_counts();
        let mut r = rng(2);
        for _ in 0..50 {
            pop = step_recombination(&pop, &mut r).unwrap();
            assert_eq!(pop.allele_counts(), before);
        }
    }

    #[test]
    fn identical_strings_are_a_recombination_fixed_point() {
        let pop = AllelePopulation::filled(2, &[1, 0, 1], 64).unwrap();
        assert_eq!(step_recombination(&pop, &mut rng(3)).unwrap(), pop);
    }

    #[test]
    fn odd_population_cannot_recombine() {
        let pop = AllelePopulation::filled(2, &[1, 0], 5).unwrap();
        assert_eq!(
            step_recombination(&pop, &mut rng(4)).unwrap_err(),
            EquilibriumError::OddPopulation(5)
        );
        assert!(step_mutation(&pop, 0.5, &mut rng(4)).is_ok());
    }

    #[test]
    fn both_with_zero_rate_equals_recombination() {
        let strings: Vec<Vec<u32>> = (0..100u32).map(|i| vec![i % 2, (i / 2) % 2, (i / 4) % 2]).collect();
        let pop = AllelePopulation::new(2, &strings).unwrap();
        let a = step_both(&pop, 0.0, &mut rng(5)).unwrap();
        let b = step_recombination(&pop, &mut rng(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn limits_sum_to_one() {
        let strings: Vec<Vec<u32>> = (0..90u32).map(|i| vec![i % 3, (i / 5) % 3]).collect();
        let pop = AllelePopulation::new(3, &strings).unwrap();
        for mode in [Mode::Mutation, Mode::Recombination, Mode::Both] {
            let s: f64 = equilibrium_limit(&pop, mode).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        let s: f64 = pop.string_proportions().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        for locus in pop.allele_proportions() {
            assert!((locus.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_steps_gives_initial_distance_only() {
        let pop = AllelePopulation::filled(2, &[0, 0, 0], 100).unwrap();
        let t = trajectory(&pop, Mode::Mutation, 0.1, 0, &mut rng(6)).unwrap();
        assert_eq!(t.series.len(), 1);
        assert!((t.series[0].distance - 0.875).abs() < 1e-15);
        assert_eq!(t.to_csv().lines().count(), 2);
    }

    #[test]
    fn string_index_round_trips() {
        let pop = AllelePopulation::filled(3, &[0, 0, 0], 2).unwrap();
        for idx in 0..27 {
            assert_eq!(pop.string_index(&pop.string_of(idx)), idx);
        }
    }

    #[test]
    fn rejects_bad_populations() {
        assert!(AllelePopulation::new(1, &[vec![0]]).is_err());
        assert!(AllelePopulation::new(2, &[vec![0, 2]]).is_err());
        assert!(AllelePopulation::new(2, &[vec![0, 1], vec![0]]).is_err());
        assert!(AllelePopulation::new(2, &[vec![]]).is_err());
        assert!("drift".parse::<Mode>().is_err());
    }
}
