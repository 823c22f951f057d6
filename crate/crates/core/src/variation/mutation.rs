use rand::Rng;

use crate::program::{random_leaf, random_program, Individual, Node, Operator};
use crate::variation::config::VariationConfig;
use crate::variation::feedback::FeedbackProbs;
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutationKind {
    /// Swap one node for a same-arity operator or another leaf.
    Point,
    DeleteFeature,
    AddFeature,
}

/// Mutation kinds allowed for an individual of dimensionality `m`.
pub fn legal_mutations(m: usize, max_dimensionality: usize) -> Vec<MutationKind> {
    let mut kinds = vec![MutationKind::Point];
    if m > 1 {
        kinds.push(MutationKind::DeleteFeature);
    }
    if m < max_dimensionality {
        kinds.push(MutationKind::AddFeature);
    }
    kinds
}

/// Applies one mutation, drawn uniformly from the legal kinds. The affected
/// feature (for point mutation and deletion) is chosen by `probs1`.
pub fn mutate<T: Scalar, R: Rng + ?Sized>(
    p1: &Individual<T>,
    probs1: &FeedbackProbs,
    cfg: &VariationConfig,
    n_attributes: usize,
    rng: &mut R,
) -> Individual<T> {
    let kinds = legal_mutations(p1.dimensionality(), cfg.max_dimensionality);
    let kind = kinds[rng.gen_range(0..kinds.len())];
    let mut programs = p1.programs.clone();
    match kind {
        MutationKind::Point => {
            let slot = probs1.sample(rng);
            let program = &mut programs[slot];
            let at = rng.gen_range(0..program.node_count());
            let node = &mut program.nodes_mut()[at];
            *node = match node {
                Node::Op { op, weights } => {
                    let choices: Vec<Operator> = Operator::ALL
                        .into_iter()
                        .filter(|o| o.arity() == op.arity() && o != op)
                        .collect();
                    let new_op = choices[rng.gen_range(0..choices.len())];
                    let weights = if new_op.differentiable() && op.differentiable() {
                        *weights
                    } else {
                        [T::one(); 2]
                    };
                    Node::Op { op: new_op, weights }
                }
                _ => random_leaf(n_attributes, rng),
            };
        }
        MutationKind::DeleteFeature => {
            programs.remove(probs1.sample(rng));
        }
        MutationKind::AddFeature => {
            programs.push(random_program(cfg.max_depth, n_attributes, rng));
        }
    }
    Individual::new(programs)
}
