use std::collections::{HashMap, HashSet};

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::operators::{crossover, mutate, random_genotype};
use super::select::{select_parents, survive};
use super::{GaConfig, GaError, GaRng, Genome, Genotype, Individual, Ranked};
use crate::dataset::Dataset;
use crate::regress::fit_mlr;

/// A fitness landscape together with its variation operators.
pub trait Problem {
    type Genome: Genome;

    fn random_genome(&self, rng: &mut GaRng) -> Self::Genome;
    fn crossover(
        &self,
        a: &Self::Genome,
        b: &Self::Genome,
        rate: f64,
        rng: &mut GaRng,
    ) -> (Self::Genome, Self::Genome);
    fn mutate(&self, g: &Self::Genome, rate: f64, rng: &mut GaRng) -> Self::Genome;
    /// Larger is better. May draw from `rng` (noisy objectives).
    fn evaluate(&mut self, g: &Self::Genome, rng: &mut GaRng) -> f64;
}

/// Per-generation diversity counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub distinct_genotypes: usize,
    pub distinct_fitnesses: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord<G = Genotype> {
    pub config: GaConfig,
    /// Best fitness of generations `0..=generations`.
    pub best_trace: Vec<f64>,
    /// Generations at which `best_trace` strictly increased.
    pub improvement_events: Vec<usize>,
    pub final_best: Individual<G>,
    pub census: Vec<Census>,
}

impl<G> RunRecord<G> {
    pub fn n_evolutions(&self) -> usize {
        self.improvement_events.len()
    }
}

fn census<G: Genome>(pop: &[Individual<G>]) -> Census {
    let genotypes: HashSet<Vec<u64>> = pop.iter().map(|i| i.genotype.census_key()).collect();
    let fitnesses: HashSet<u64> = pop.iter().map(|i| i.fitness.to_bits()).collect();
    Census {
        distinct_genotypes: genotypes.len(),
        distinct_fitnesses: fitnesses.len(),
    }
}

fn best_of<G: Genome>(pop: &[Individual<G>]) -> &Individual<G> {
    pop.iter()
        .min_by(|a, b| a.rank_cmp(b))
        .expect("population is nonempty")
}

/// Runs the generational loop. `observer` sees every population, including
/// generation 0, after survival.
///
/// Each generation draws `P` parents, pairs them in order, applies crossover
/// then mutation to each pair, evaluates the children and lets the survival
/// rule pick the next population from parents ∪ children.
pub fn run_problem<P, F>(
    problem: &mut P,
    config: &GaConfig,
    mut observer: F,
) -> Result<RunRecord<P::Genome>, GaError>
where
    P: Problem,
    F: FnMut(usize, &[Individual<P::Genome>]),
{
    config.validate()?;
    let mut rng = GaRng::seed_from_u64(config.seed);
    let size = config.population_size;

    let mut pop: Vec<Individual<P::Genome>> = (0..size)
        .map(|_| {
            let genotype = problem.random_genome(&mut rng);
            let fitness = problem.evaluate(&genotype, &mut rng);
            Individual { genotype, fitness }
        })
        .collect();
    observer(0, &pop);

    let mut best_trace = Vec::with_capacity(config.generations + 1);
    let mut improvement_events = Vec::new();
    let mut censuses = Vec::with_capacity(config.generations + 1);
    best_trace.push(best_of(&pop).fitness);
    censuses.push(census(&pop));

    for generation in 1..=config.generations {
        let parents = select_parents(
            &pop,
            size,
            config.strategy.selection,
            config.tournament_size,
            &mut rng,
        )?;
        let mut offspring = Vec::with_capacity(size);
        for pair in parents.chunks_exact(2) {
            let (a, b) = problem.crossover(
                &pair[0].genotype,
                &pair[1].genotype,
                config.crossover_rate,
                &mut rng,
            );
            for child in [a, b] {
                let genotype = problem.mutate(&child, config.mutation_rate, &mut rng);
                let fitness = problem.evaluate(&genotype, &mut rng);
                offspring.push(Individual { genotype, fitness });
            }
        }
        pop = survive(
            &pop,
            &offspring,
            config.strategy.survival,
            config.tournament_size,
            &mut rng,
        )?;
        observer(generation, &pop);

        let best = best_of(&pop).fitness;
        if best > *best_trace.last().expect("generation 0 recorded") {
            improvement_events.push(generation);
        }
        best_trace.push(best);
        censuses.push(census(&pop));
    }

    Ok(RunRecord {
        config: config.clone(),
        best_trace,
        improvement_events,
        final_best: best_of(&pop).clone(),
        census: censuses,
    })
}

/// Descriptor-subset selection against a dataset. Fitness values are
/// memoized by the sorted gene set, which `fit_mlr` treats identically.
pub struct RegressionProblem<'a> {
    data: &'a Dataset,
    k: usize,
    cache: HashMap<Vec<usize>, f64>,
}

impl<'a> RegressionProblem<'a> {
    pub fn new(data: &'a Dataset, k: usize) -> Result<Self, GaError> {
        let m = data.n_descriptors();
        if k < 1 || k > m {
            return Err(GaError::InvalidConfig(format!(
                "k={k} needs 1 ≤ k ≤ {m} descriptors"
            )));
        }
        if data.n_rows() < k + 2 {
            return Err(GaError::InvalidConfig(format!(
                "k={k} needs at least {} rows, dataset has {}",
                k + 2,
                data.n_rows()
            )));
        }
        Ok(Self {
            data,
            k,
            cache: HashMap::new(),
        })
    }
}

impl Problem for RegressionProblem<'_> {
    type Genome = Genotype;

    fn random_genome(&self, rng: &mut GaRng) -> Genotype {
        random_genotype(self.k, self.data.n_descriptors(), rng)
    }

    fn crossover(&self, a: &Genotype, b: &Genotype, rate: f64, rng: &mut GaRng) -> (Genotype, Genotype) {
        crossover(a, b, rate, self.data.n_descriptors(), rng)
    }

    fn mutate(&self, g: &Genotype, rate: f64, rng: &mut GaRng) -> Genotype {
        mutate(g, rate, self.data.n_descriptors(), rng)
    }

    fn evaluate(&mut self, g: &Genotype, _rng: &mut GaRng) -> f64 {
        let data = self.data;
        *self
            .cache
            .entry(g.sorted_genes())
            .or_insert_with(|| fit_mlr(data, &g.genes).map(|m| m.r2).unwrap_or(0.0))
    }
}

/// Evolves descriptor subsets of size `config.k` maximizing r².
pub fn run(data: &Dataset, config: &GaConfig) -> Result<RunRecord, GaError> {
    run_observed(data, config, |_, _| {})
}

pub fn run_observed<F>(data: &Dataset, config: &GaConfig, observer: F) -> Result<RunRecord, GaError>
where
    F: FnMut(usize, &[Individual]),
{
    config.validate()?;
    let mut problem = RegressionProblem::new(data, config.k)?;
    run_problem(&mut problem, config, observer)
}
