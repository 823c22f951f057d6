mod common;

use common::{gradient_vs_fd, randomize_weights, uniform_rows};
use mgp_core::dataset::Dataset;
use mgp_core::program::random_program;
use mgp_core::rng::seeded;
use mgp_core::Program;

const H: f64 = 1e-5;

/// Checks one program; returns (entries compared, entries skipped as non-smooth).
fn check(p: &Program<f64>, ds: &Dataset<f64>) -> (usize, usize) {
    let (rels, skipped) = gradient_vs_fd(p, ds, H);
    for (i, rel) in rels.iter().enumerate() {
        assert!(*rel < 1e-4, "entry {i}: relative error {rel}");
    }
    (rels.len(), skipped)
}

#[test]
fn analytic_gradient_matches_central_differences() {
    let mut rng = seeded(77);
    let rows = uniform_rows(25, 3, -2.0, 2.0, &mut rng);
    let ds = Dataset::from_rows(&rows, vec![0.0; 25]).unwrap();
    let (mut programs, mut compared, mut skipped) = (0, 0, 0);
    while programs < 150 {
        let mut p: Program<f64> = random_program(4, 3, &mut rng);
        if p.n_weights() == 0 {
            continue;
        }
        randomize_weights(&mut p, &mut rng);
        let (c, s) = check(&p, &ds);
        compared += c;
        skipped += s;
        programs += 1;
    }
    eprintln!("programs {programs}, entries compared {compared}, skipped {skipped}");
    assert!(compared > 10 * skipped, "compared {compared}, skipped {skipped}");
}

#[test]
fn gradient_shape() {
    let mut rng = seeded(3);
    let rows = uniform_rows(7, 2, -1.0, 1.0, &mut rng);
    let ds = Dataset::from_rows(&rows, vec![0.0; 7]).unwrap();
    for _ in 0..50 {
        let p: Program<f64> = random_program(4, 2, &mut rng);
        let g = p.gradient(&ds).unwrap();
        assert_eq!((g.rows(), g.cols()), (7, p.n_weights()));
    }
}
