use rand::Rng;

use super::{GaError, Ranked, StrategyKind};

/// Roulette weights. Negative fitness (De Jong objectives) is windowed by
/// the population minimum; nonnegative fitness is used as is.
fn weights<I: Ranked>(pop: &[I]) -> Vec<f64> {
    let min = pop.iter().map(Ranked::fitness).fold(f64::INFINITY, f64::min);
    let shift = if min < 0.0 { min } else { 0.0 };
    pop.iter().map(|i| i.fitness() - shift).collect()
}

/// Draws a position proportionally to `w` over the positions in `live`;
/// uniform when every live weight is zero.
fn roulette<R: Rng + ?Sized>(w: &[f64], live: &[usize], rng: &mut R) -> usize {
    let total: f64 = live.iter().map(|&i| w[i]).sum();
    if total <= 0.0 {
        return rng.random_range(0..live.len());
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (pos, &i) in live.iter().enumerate() {
        if w[i] > 0.0 {
            acc += w[i];
            last_positive = pos;
            if acc > target {
                return pos;
            }
        }
    }
    last_positive
}

/// Best of `size` uniform picks (with replacement) among `live`.
fn tournament<I: Ranked, R: Rng + ?Sized>(
    pop: &[I],
    live: &[usize],
    size: usize,
    rng: &mut R,
) -> usize {
    let mut best = rng.random_range(0..live.len());
    for _ in 1..size {
        let c = rng.random_range(0..live.len());
        if pop[live[c]].rank_cmp(&pop[live[best]]).is_lt() {
            best = c;
        }
    }
    best
}

fn ranking<I: Ranked>(pop: &[I]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| pop[a].rank_cmp(&pop[b]));
    order
}

/// Draws `n` parents with replacement.
///
/// Deterministic selection takes the ranking from the top and wraps around
/// when `n` exceeds the population.
pub fn select_parents<I: Ranked + Clone, R: Rng + ?Sized>(
    pop: &[I],
    n: usize,
    kind: StrategyKind,
    tournament_size: usize,
    rng: &mut R,
) -> Result<Vec<I>, GaError> {
    if pop.is_empty() {
        return Err(GaError::EmptyPopulation);
    }
    let all: Vec<usize> = (0..pop.len()).collect();
    let picks: Vec<usize> = match kind {
        StrategyKind::Proportional => {
            let w = weights(pop);
            (0..n).map(|_| roulette(&w, &all, rng)).collect()
        }
        StrategyKind::Deterministic => {
            let order = ranking(pop);
            (0..n).map(|i| order[i % order.len()]).collect()
        }
        StrategyKind::Tournament => (0..n)
            .map(|_| tournament(pop, &all, tournament_size.max(1), rng))
            .collect(),
    };
    Ok(picks.into_iter().map(|i| pop[i].clone()).collect())
}

/// Chooses `parents.len()` survivors from `parents ∪ offspring` without
/// replacement. The best member of the merged pool always survives.
pub fn survive<I: Ranked + Clone, R: Rng + ?Sized>(
    parents: &[I],
    offspring: &[I],
    kind: StrategyKind,
    tournament_size: usize,
    rng: &mut R,
) -> Result<Vec<I>, GaError> {
    if parents.len() != offspring.len() {
        return Err(GaError::SizeMismatch {
            parents: parents.len(),
            offspring: offspring.len(),
        });
    }
    if parents.is_empty() {
        return Err(GaError::EmptyPopulation);
    }
    let pool: Vec<I> = parents.iter().chain(offspring).cloned().collect();
    let target = parents.len();
    let order = ranking(&pool);

    let mut chosen: Vec<usize> = match kind {
        StrategyKind::Deterministic => order[..target].to_vec(),
        StrategyKind::Proportional => {
            let w = weights(&pool);
            let mut live: Vec<usize> = (0..pool.len()).collect();
            (0..target)
                .map(|_| live.remove(roulette(&w, &live, rng)))
                .collect()
        }
        StrategyKind::Tournament => {
            let mut live: Vec<usize> = (0..pool.len()).collect();
            (0..target)
                .map(|_| live.remove(tournament(&pool, &live, tournament_size.max(1), rng)))
                .collect()
        }
    };

    let elite = order[0];
    if !chosen.contains(&elite) {
        let worst = (0..chosen.len())
            .max_by(|&a, &b| pool[chosen[a]].rank_cmp(&pool[chosen[b]]))
            .expect("target ≥ 1");
        chosen[worst] = elite;
    }
    Ok(chosen.into_iter().map(|i| pool[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::{GaRng, Genotype, Individual};
    use rand::SeedableRng;

    fn pop(fit: &[f64]) -> Vec<Individual> {
        fit.iter()
            .enumerate()
            .map(|(i, &f)| Individual {
                genotype: Genotype::new(vec![i]),
                fitness: f,
            })
            .collect()
    }

    /// |observed − expected| within three binomial standard errors.
    fn within_3_sigma(hits: usize, draws: usize, p: f64) -> bool {
        let sd = (p * (1.0 - p) / draws as f64).sqrt();
        (hits as f64 / draws as f64 - p).abs() <= 3.0 * sd
    }

    fn frequencies(sel: &[Individual], n: usize) -> Vec<usize> {
        let mut c = vec![0; n];
        for i in sel {
            c[i.genotype.genes[0]] += 1;
        }
        c
    }

    #[test]
    fn proportional_equal_fitness_is_uniform() {
        let p = pop(&[0.4; 5]);
        let mut rng = GaRng::seed_from_u64(11);
        let s = select_parents(&p, 100_000, StrategyKind::Proportional, 2, &mut rng).unwrap();
        for c in frequencies(&s, 5) {
            assert!(within_3_sigma(c, 100_000, 0.2), "{c}");
        }
    }

    #[test]
    fn proportional_matches_fitness_share() {
        let p = pop(&[1.0, 3.0]);
        let mut rng = GaRng::seed_from_u64(12);
        let s = select_parents(&p, 100_000, StrategyKind::Proportional, 2, &mut rng).unwrap();
        let c = frequencies(&s, 2);
        assert!(within_3_sigma(c[0], 100_000, 0.25));
        assert!(within_3_sigma(c[1], 100_000, 0.75));
    }

    #[test]
    fn proportional_all_zero_falls_back_to_uniform() {
        let p = pop(&[0.0; 4]);
        let mut rng = GaRng::seed_from_u64(13);
        let s = select_parents(&p, 40_000, StrategyKind::Proportional, 2, &mut rng).unwrap();
        for c in frequencies(&s, 4) {
            assert!(within_3_sigma(c, 40_000, 0.25));
        }
    }

    #[test]
    fn binary_tournament_picks_best_three_quarters() {
        let p = pop(&[1.0, 2.0]);
        let mut rng = GaRng::seed_from_u64(14);
        let s = select_parents(&p, 100_000, StrategyKind::Tournament, 2, &mut rng).unwrap();
        assert!(within_3_sigma(frequencies(&s, 2)[1], 100_000, 0.75));
    }

    #[test]
    fn deterministic_takes_top_and_cycles() {
        let p = pop(&[0.1, 0.9, 0.5, 0.9]);
        let mut rng = GaRng::seed_from_u64(15);
        let s = select_parents(&p, 6, StrategyKind::Deterministic, 2, &mut rng).unwrap();
        let ids: Vec<usize> = s.iter().map(|i| i.genotype.genes[0]).collect();
        // Tie at 0.9 broken by genotype order: [1] before [3].
        assert_eq!(ids, [1, 3, 2, 0, 1, 3]);
    }

    #[test]
    fn empty_population_is_an_error() {
        let mut rng = GaRng::seed_from_u64(0);
        let e = select_parents::<Individual, _>(&[], 3, StrategyKind::Tournament, 2, &mut rng);
        assert_eq!(e.unwrap_err(), GaError::EmptyPopulation);
    }

    #[test]
    fn deterministic_survival_is_truncation() {
        let parents = pop(&[0.1, 0.7, 0.3, 0.2]);
        let mut offspring = pop(&[0.9, 0.05, 0.6, 0.4]);
        for (i, o) in offspring.iter_mut().enumerate() {
            o.genotype.genes[0] = 10 + i;
        }
        let mut rng = GaRng::seed_from_u64(1);
        let s = survive(&parents, &offspring, StrategyKind::Deterministic, 2, &mut rng).unwrap();
        let f: Vec<f64> = s.iter().map(|i| i.fitness).collect();
        assert_eq!(f, [0.9, 0.7, 0.6, 0.4]);
    }

    #[test]
    fn proportional_survival_keeps_lone_positive_member() {
        let mut fit = vec![0.0; 19];
        fit.push(1.0);
        let pool = pop(&fit);
        let (parents, offspring) = pool.split_at(10);
        let mut rng = GaRng::seed_from_u64(2);
        for _ in 0..10_000 {
            let s = survive(parents, offspring, StrategyKind::Proportional, 2, &mut rng).unwrap();
            assert!(s.iter().any(|i| i.fitness == 1.0));
        }
    }

    #[test]
    fn survival_sizes_must_match() {
        let mut rng = GaRng::seed_from_u64(3);
        let e = survive(&pop(&[1.0, 2.0]), &pop(&[1.0]), StrategyKind::Tournament, 2, &mut rng);
        assert!(matches!(e, Err(GaError::SizeMismatch { .. })));
    }

    #[test]
    fn survivors_are_distinct_pool_members() {
        let parents = pop(&[0.5, 0.5, 0.2, 0.8, 0.1, 0.3]);
        let offspring: Vec<Individual> = pop(&[0.6, 0.5, 0.7, 0.0, 0.9, 0.3])
            .into_iter()
            .map(|mut i| {
                i.genotype.genes[0] += 100;
                i
            })
            .collect();
        let mut rng = GaRng::seed_from_u64(4);
        for kind in StrategyKind::ALL {
            for _ in 0..200 {
                let s = survive(&parents, &offspring, kind, 3, &mut rng).unwrap();
                let mut ids: Vec<usize> = s.iter().map(|i| i.genotype.genes[0]).collect();
                ids.sort_unstable();
                ids.dedup();
                assert_eq!(ids.len(), 6);
                assert!(ids.contains(&104));
            }
        }
    }
}
