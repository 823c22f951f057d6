//! Multidimensional genetic programming for symbolic regression.
//!
//! An individual is a set of expression trees whose outputs are standardized
//! and combined by ridge regression. Evolution uses ε-lexicase parent
//! selection, NSGA-II survival and, besides standard feature and subtree
//! crossover, two semantic crossovers that pick donor features by their fit
//! to the parent's residual.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! name the common instantiations.

pub mod dataset;
pub mod error;
pub mod evolution;
pub mod matrix;
pub mod model;
pub mod program;
pub mod rng;
mod scalar;
pub mod variation;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use evolution::{evolve, init_population, EvolutionConfig, Population, RunHistory};
pub use matrix::Matrix;
pub use model::{FitSettings, FittedModel, ModelDocument, Scores};
pub use program::{Individual, Operator, Program};
pub use scalar::Scalar;
pub use variation::{CrossoverKind, VariationConfig};

pub type Dataset64 = Dataset<f64>;
pub type Program64 = Program<f64>;
pub type Individual64 = Individual<f64>;
pub type FittedModel64 = FittedModel<f64>;
pub type Population64 = Population<f64>;

pub type Dataset32 = Dataset<f32>;
pub type Program32 = Program<f32>;
pub type Individual32 = Individual<f32>;
pub type FittedModel32 = FittedModel<f32>;
pub type Population32 = Population<f32>;
