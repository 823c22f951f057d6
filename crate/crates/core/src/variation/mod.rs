//! Offspring-producing operators.

mod config;
mod crossover;
mod feedback;
mod mutation;
mod semantic;

pub use config::{default_max_dimensionality, CrossoverKind, VariationConfig, DEFAULT_MAX_DEPTH};
pub use crossover::{feature_crossover, subtree_crossover, SUBTREE_RETRIES};
pub use feedback::{feedback_probs, FeedbackProbs};
pub use mutation::{legal_mutations, mutate, MutationKind};
pub use semantic::{
    res_xo, res_xo_choice, residual_without, stage_xo, stage_xo_selection, Parent, PoolRef, ResXoChoice,
    CORRELATION_TIE, RESIDUAL_FLOOR,
};
