use rand::Rng;

use crate::program::{Individual, Program};
use crate::variation::feedback::FeedbackProbs;
use crate::Scalar;

/// Attempts at a depth-legal subtree splice before giving up.
pub const SUBTREE_RETRIES: usize = 10;

/// Child of `p1` whose feature chosen by `probs1` is replaced by the feature
/// of `p2` chosen by `probs2`.
pub fn feature_crossover<T: Scalar, R: Rng + ?Sized>(
    p1: &Individual<T>,
    p2: &Individual<T>,
    probs1: &FeedbackProbs,
    probs2: &FeedbackProbs,
    rng: &mut R,
) -> Individual<T> {
    let slot = probs1.sample(rng);
    let donor = probs2.sample(rng);
    let mut programs = p1.programs.clone();
    programs[slot] = p2.programs[donor].clone();
    Individual::new(programs)
}

/// Standard subtree crossover inside one feature of `p1`.
///
/// The receiving feature comes from `probs1`, the receiving node and the donor
/// (feature and node) are uniform. Splices deeper than `max_depth` are
/// redrawn; after [`SUBTREE_RETRIES`] failures the child is a copy of `p1`.
pub fn subtree_crossover<T: Scalar, R: Rng + ?Sized>(
    p1: &Individual<T>,
    p2: &Individual<T>,
    probs1: &FeedbackProbs,
    max_depth: usize,
    rng: &mut R,
) -> Individual<T> {
    for _ in 0..SUBTREE_RETRIES {
        let slot = probs1.sample(rng);
        let target = &p1.programs[slot];
        let at = rng.gen_range(0..target.node_count());
        let donor_feature = &p2.programs[rng.gen_range(0..p2.dimensionality())];
        let donor_at = rng.gen_range(0..donor_feature.node_count());
        let donor = donor_feature.subtree(donor_at);

        let depth_at = target.node_depths()[at];
        if depth_at - 1 + donor.depth() > max_depth {
            continue;
        }
        let spliced: Program<T> = target.replace_subtree(at, &donor);
        let mut programs = p1.programs.clone();
        programs[slot] = spliced;
        return Individual::new(programs);
    }
    p1.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{random_program, Operator};
    use crate::rng;
    use crate::variation::feedback_probs;

    fn ind(ps: Vec<Program<f64>>) -> Individual<f64> {
        Individual::new(ps)
    }

    #[test]
    fn single_feature_parents_swap() {
        let p1 = ind(vec![Program::var(0)]);
        let p2 = ind(vec![Program::unary(Operator::Cos, Program::var(1))]);
        let u = FeedbackProbs::uniform(1);
        let child = feature_crossover(&p1, &p2, &u, &u, &mut rng::seeded(0));
        assert_eq!(child.programs, p2.programs);
    }

    #[test]
    fn slot_choice_uniform_without_feedback() {
        // multinomial frequency test: 10k draws, each count within 3 sigma of n/m
        let p1 = ind((0..4).map(Program::var).collect());
        let p2 = ind(vec![Program::constant(9.0)]);
        let probs1 = feedback_probs(&[5.0, 1.0, 0.5, 0.01], 0.0, false);
        let probs2 = FeedbackProbs::uniform(1);
        let mut r = rng::seeded(3);
        let mut counts = [0usize; 4];
        let draws = 10_000;
        for _ in 0..draws {
            let c = feature_crossover(&p1, &p2, &probs1, &probs2, &mut r);
            let slot = (0..4).find(|&i| c.programs[i] != p1.programs[i]).unwrap();
            counts[slot] += 1;
        }
        let mean = draws as f64 / 4.0;
        let sigma = (draws as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn complexity_accounting() {
        let mut r = rng::seeded(8);
        for _ in 0..200 {
            let p1 = ind((0..3).map(|_| random_program(5, 3, &mut r)).collect());
            let p2 = ind((0..2).map(|_| random_program(5, 3, &mut r)).collect());
            let u1 = FeedbackProbs::uniform(3);
            let u2 = FeedbackProbs::uniform(2);
            let c = feature_crossover(&p1, &p2, &u1, &u2, &mut r);
            let slot = (0..3).find(|&i| c.programs[i] != p1.programs[i]);
            if let Some(s) = slot {
                assert_eq!(c.complexity, p1.complexity - p1.programs[s].node_count() + c.programs[s].node_count());
            } else {
                assert_eq!(c.complexity, p1.complexity);
            }
            assert_eq!(c.dimensionality(), 3);
        }
    }

    #[test]
    fn leaf_parents_subtree() {
        let p1 = ind(vec![Program::var(0)]);
        let p2 = ind(vec![Program::var(2)]);
        let c = subtree_crossover(&p1, &p2, &FeedbackProbs::uniform(1), 6, &mut rng::seeded(1));
        assert_eq!(c.programs, p2.programs);
    }

    #[test]
    fn depth_cap_fuzz() {
        let mut r = rng::seeded(11);
        let pop: Vec<Individual<f64>> = (0..50)
            .map(|_| ind((0..3).map(|_| random_program(6, 4, &mut r)).collect()))
            .collect();
        for k in 0..10_000 {
            let a = &pop[k % 50];
            let b = &pop[(k * 7 + 3) % 50];
            let c = subtree_crossover(a, b, &FeedbackProbs::uniform(3), 6, &mut r);
            assert!(c.max_depth() <= 6);
        }
    }

    #[test]
    fn retry_exhaustion_copies_parent() {
        let p1 = ind(vec![Program::unary(Operator::Sin, Program::var(0))]);
        let deep = Program::unary(Operator::Cos, Program::unary(Operator::Sin, Program::var(1)));
        let p2 = ind(vec![deep.clone()]);
        let mut r = rng::seeded(0);
        for _ in 0..200 {
            let c = subtree_crossover(&p1, &p2, &FeedbackProbs::uniform(1), 2, &mut r);
            assert!(c.max_depth() <= 2);
        }

        // no splice can satisfy a zero cap, so all retries fail
        let c = subtree_crossover(&p1, &p2, &FeedbackProbs::uniform(1), 0, &mut rng::seeded(2));
        assert_eq!(c, p1);
    }
}
