mod common;

use common::{lexicase_probabilities, random_dataset, random_individual, randomize_weights};
use mgp_core::dataset::{synth_problem, Dataset};
use mgp_core::evolution::{case_epsilons, eps_lexicase_select, evolve, EvolutionConfig};
use mgp_core::model::{entanglement, fit_individual, FitSettings};
use mgp_core::program::{parse, random_program, render};
use mgp_core::rng::seeded;
use mgp_core::variation::{feature_crossover, mutate, subtree_crossover, CrossoverKind, FeedbackProbs, VariationConfig};
use mgp_core::{Matrix, Program};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn evaluation_is_total() {
    let mut rng = seeded(1);
    let extremes = [0.0, -0.0, 1e-300, -1e-300, 1e6, -1e6, 1e150, -1e150, 700.0, -700.0];
    let rows: Vec<Vec<f64>> = (0..extremes.len())
        .map(|i| vec![extremes[i], extremes[(i + 3) % extremes.len()]])
        .collect();
    let ds = Dataset::from_rows(&rows, vec![0.0; rows.len()]).unwrap();
    for _ in 0..5000 {
        let mut p: Program<f64> = random_program(6, 2, &mut rng);
        randomize_weights(&mut p, &mut rng);
        let out = p.evaluate(&ds).unwrap();
        assert!(out.iter().all(|v| v.is_finite()), "{}", render(&p));
        let g = p.gradient(&ds).unwrap();
        assert!((0..g.cols()).all(|k| g.col(k).iter().all(|v| v.is_finite())), "{}", render(&p));
    }
}

proptest! {
    #[test]
    fn render_parse_round_trip(seed in any::<u64>(), depth in 1usize..7) {
        let mut rng = seeded(seed);
        let mut p: Program<f64> = random_program(depth, 4, &mut rng);
        randomize_weights(&mut p, &mut rng);
        let text = render(&p);
        let q: Program<f64> = parse(&text).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(render(&q), text);
    }

    #[test]
    fn entanglement_invariant_to_order_and_affine_maps(seed in any::<u64>(), scale in 0.01f64..100.0, shift in -50.0f64..50.0) {
        let mut rng = seeded(seed);
        let cols: Vec<Vec<f64>> = (0..4).map(|_| (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let base = entanglement(&Matrix::from_columns(30, cols.clone())).value;
        let mut moved = cols.clone();
        moved.reverse();
        moved[1] = moved[1].iter().map(|v| -scale * v + shift).collect();
        let other = entanglement(&Matrix::from_columns(30, moved)).value;
        prop_assert!((base - other).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&base));
    }
}

#[test]
fn weight_refinement_never_hurts() {
    let ds = random_dataset(60, 3, 9);
    let mut rng = seeded(21);
    let plain = FitSettings { gd_iters: 0, ..FitSettings::default() };
    let tuned = FitSettings::default();
    for _ in 0..50 {
        let m = rng.gen_range(1..=4);
        let mut ind = random_individual(m, 4, 3, &mut rng);
        for p in &mut ind.programs {
            randomize_weights(p, &mut rng);
        }
        let a = fit_individual(&ind, &ds, &plain).unwrap().individual.fitness_mse;
        let b = fit_individual(&ind, &ds, &tuned).unwrap().individual.fitness_mse;
        assert!(b <= a, "{b} > {a}");
    }
}

fn frequencies(errors: &[Vec<f64>], draws: usize, seed: u64) -> Vec<f64> {
    let eps = case_epsilons(errors);
    let mut rng = seeded(seed);
    let mut counts = vec![0usize; errors.len()];
    for _ in 0..draws {
        counts[eps_lexicase_select(errors, &eps, &mut rng)] += 1;
    }
    counts.iter().map(|&c| c as f64 / draws as f64).collect()
}

#[test]
fn lexicase_matches_enumeration_on_hand_table() {
    // with ε = 1 on both cases: order (0,1) leaves {A, B}, order (1,0) leaves {B, C}
    let errors = vec![vec![0.0, 2.0], vec![1.0, 1.0], vec![2.0, 0.0]];
    let exact = lexicase_probabilities(&errors);
    for (p, want) in exact.iter().zip([0.25, 0.5, 0.25]) {
        assert!((p - want).abs() < 1e-15);
    }
    let draws = 100_000;
    let freq = frequencies(&errors, draws, 5);
    for (f, p) in freq.iter().zip(&exact) {
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((f - p).abs() <= 3.0 * sigma, "{freq:?} vs {exact:?}");
    }
}

#[test]
fn lexicase_invariant_to_case_duplication() {
    let errors = vec![
        vec![0.0, 3.0, 1.0],
        vec![2.0, 0.5, 0.0],
        vec![1.0, 1.0, 4.0],
        vec![0.5, 2.0, 2.0],
    ];
    let doubled: Vec<Vec<f64>> = errors.iter().map(|e| e.iter().chain(e).copied().collect()).collect();
    let exact = lexicase_probabilities(&errors);
    let exact_doubled = lexicase_probabilities(&doubled);
    for (a, b) in exact.iter().zip(&exact_doubled) {
        assert!((a - b).abs() < 1e-12, "{exact:?} vs {exact_doubled:?}");
    }
    let draws = 50_000;
    let freq = frequencies(&doubled, draws, 8);
    for (f, p) in freq.iter().zip(&exact) {
        let sigma = (p * (1.0 - p) / draws as f64).sqrt().max(1e-9);
        assert!((f - p).abs() <= 3.0 * sigma + 1e-12, "{freq:?} vs {exact:?}");
    }
}

#[test]
fn operators_respect_caps() {
    let ds = random_dataset(30, 3, 4);
    let cfg = VariationConfig::tuned(CrossoverKind::Standard, 3);
    let mut rng = seeded(31);
    for _ in 0..3000 {
        let m1 = rng.gen_range(1..=cfg.max_dimensionality);
        let m2 = rng.gen_range(1..=cfg.max_dimensionality);
        let p1 = random_individual(m1, cfg.max_depth, 3, &mut rng);
        let p2 = random_individual(m2, cfg.max_depth, 3, &mut rng);
        let (q1, q2) = (FeedbackProbs::uniform(m1), FeedbackProbs::uniform(m2));
        for child in [
            feature_crossover(&p1, &p2, &q1, &q2, &mut rng),
            subtree_crossover(&p1, &p2, &q1, cfg.max_depth, &mut rng),
            mutate(&p1, &q1, &cfg, ds.n_attributes(), &mut rng),
        ] {
            assert!(child.max_depth() <= cfg.max_depth);
            assert!((1..=cfg.max_dimensionality).contains(&child.dimensionality()));
            assert!(child.programs.iter().all(|p| p.check_attributes(3).is_ok()));
        }
    }
}

#[test]
fn evolution_deterministic_across_thread_counts() {
    let train: Dataset<f64> = synth_problem("koza3", 80, 1).unwrap();
    let val: Dataset<f64> = synth_problem("koza3", 40, 2).unwrap();
    let mut cfg = EvolutionConfig::tuned(CrossoverKind::StageXo, 1, 17);
    cfg.population_size = 16;
    cfg.generations = 4;
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| evolve(&cfg, &train, &val).unwrap())
    };
    let (m1, h1) = run(1);
    let (m4, h4) = run(4);
    assert_eq!(m1, m4);
    assert_eq!(format!("{h1:?}"), format!("{h4:?}"));
}

#[test]
fn generic_over_f32() {
    let train: Dataset<f32> = synth_problem("sum-sq", 60, 3).unwrap();
    let val: Dataset<f32> = synth_problem("sum-sq", 30, 4).unwrap();
    let mut cfg = EvolutionConfig::tuned(CrossoverKind::ResXo, 2, 5);
    cfg.population_size = 10;
    cfg.generations = 3;
    let (model, _) = evolve(&cfg, &train, &val).unwrap();
    let yhat = model.predict(&val).unwrap();
    assert!(yhat.iter().all(|v| v.is_finite()));
}
