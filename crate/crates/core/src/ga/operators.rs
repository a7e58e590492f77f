use rand::seq::index::sample;
use rand::Rng;

use super::{Genotype, Individual};
use crate::dataset::Dataset;
use crate::regress::fit_mlr;

/// `k` distinct indices drawn uniformly from `0..m`.
pub fn random_genotype<R: Rng + ?Sized>(k: usize, m: usize, rng: &mut R) -> Genotype {
    Genotype::new(sample(rng, m, k).into_vec())
}

/// A uniform index in `0..m` not present in `genes`. Requires `genes.len() < m`.
fn unused_index<R: Rng + ?Sized>(genes: &[usize], m: usize, rng: &mut R) -> usize {
    loop {
        let c = rng.random_range(0..m);
        if !genes.contains(&c) {
            return c;
        }
    }
}

/// Replaces each repeated gene (every occurrence after the first) with a
/// uniform unused index.
fn repair<R: Rng + ?Sized>(genes: &mut [usize], m: usize, rng: &mut R) {
    for i in 1..genes.len() {
        if genes[..i].contains(&genes[i]) {
            genes[i] = unused_index(genes, m, rng);
        }
    }
}

/// One-point crossover with probability `rate`; the cut is uniform over the
/// interior loci `1..k`. Children are repaired to keep genes distinct.
pub fn crossover<R: Rng + ?Sized>(
    a: &Genotype,
    b: &Genotype,
    rate: f64,
    m: usize,
    rng: &mut R,
) -> (Genotype, Genotype) {
    assert_eq!(a.genes.len(), b.genes.len(), "crossover of unequal lengths");
    let k = a.genes.len();
    if k < 2 || !rng.random_bool(rate) {
        return (a.clone(), b.clone());
    }
    let cut = rng.random_range(1..k);
    one_point(a, b, cut, m, rng)
}

/// Swaps the tails after locus `cut` and repairs duplicates.
pub(crate) fn one_point<R: Rng + ?Sized>(
    a: &Genotype,
    b: &Genotype,
    cut: usize,
    m: usize,
    rng: &mut R,
) -> (Genotype, Genotype) {
    let mut c1: Vec<usize> = a.genes[..cut].iter().chain(&b.genes[cut..]).copied().collect();
    let mut c2: Vec<usize> = b.genes[..cut].iter().chain(&a.genes[cut..]).copied().collect();
    repair(&mut c1, m, rng);
    repair(&mut c2, m, rng);
    (Genotype::new(c1), Genotype::new(c2))
}

/// Each locus, with probability `rate`, takes a uniform index absent from
/// the genotype. A genotype that already uses all `m` indices is unchanged.
pub fn mutate<R: Rng + ?Sized>(g: &Genotype, rate: f64, m: usize, rng: &mut R) -> Genotype {
    let mut genes = g.genes.clone();
    if genes.len() >= m {
        return Genotype::new(genes);
    }
    for i in 0..genes.len() {
        if rng.random_bool(rate) {
            genes[i] = unused_index(&genes, m, rng);
        }
    }
    Genotype::new(genes)
}

/// Fitness is r²; a rank-deficient (or otherwise unfittable) subset scores 0.
pub fn evaluate(data: &Dataset, g: &Genotype) -> Individual {
    let fitness = fit_mlr(data, &g.genes).map(|m| m.r2).unwrap_or(0.0);
    Individual {
        genotype: g.clone(),
        fitness,
    }
}
