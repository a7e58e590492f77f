use std::collections::HashSet;

use mlr_ga::dataset::synth_dataset;
use mlr_ga::ga::{run, run_observed, select_parents, GaConfig, GaRng, Genotype, Individual, StrategyKind, StrategyPair};
use proptest::prelude::*;
use rand::SeedableRng;

fn strategy() -> impl Strategy<Value = StrategyPair> {
    prop::sample::select(StrategyPair::all().to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn runs_are_elitist_and_keep_genes_distinct(
        s in strategy(), seed in any::<u64>(), k in 1usize..5, half in 2usize..10,
        cx in 0.0f64..=1.0, mu in 0.0f64..=1.0, ts in 2usize..5,
    ) {
        let data = synth_dataset(30, 8, 2, 0.5, seed % 97).unwrap().data;
        let config = GaConfig {
            population_size: 2 * half,
            k,
            generations: 25,
            crossover_rate: cx,
            mutation_rate: mu,
            tournament_size: ts,
            strategy: s,
            seed,
        };
        let mut ok = true;
        let rec = run_observed(&data, &config, |_, pop| {
            for ind in pop {
                let g = &ind.genotype.genes;
                let set: HashSet<_> = g.iter().collect();
                ok &= g.len() == k && set.len() == k && g.iter().all(|&i| i < 8);
            }
        }).unwrap();
        prop_assert!(ok);
        prop_assert!(rec.best_trace.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(rec.best_trace.len(), 26);
        let again = run(&data, &config).unwrap();
        prop_assert_eq!(serde_json::to_string(&rec).unwrap(), serde_json::to_string(&again).unwrap());
    }
}

/// Chi-square critical value at α = 0.001 for 19 degrees of freedom.
const CHI2_19_001: f64 = 43.82;

#[test]
fn equal_fitness_selection_is_uniform_for_every_rule() {
    let p = 20;
    let pop: Vec<Individual> = (0..p)
        .map(|i| Individual {
            genotype: Genotype { genes: vec![i, i + 100] },
            fitness: 0.5,
        })
        .collect();
    for kind in StrategyKind::ALL {
        let mut rng = GaRng::seed_from_u64(kind as u64 + 1);
        let mut counts = vec![0usize; p];
        let draws = 100_000 / p;
        for _ in 0..draws {
            for ind in select_parents(&pop, p, kind, 1, &mut rng).unwrap() {
                counts[ind.genotype.genes[0]] += 1;
            }
        }
        let expected = (draws * p) as f64 / p as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < CHI2_19_001, "{kind:?}: chi2 {chi2}");
    }
}
