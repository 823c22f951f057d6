//! Splitting and single-run plumbing shared by the subcommands.

use std::time::Instant;

use mgp_core::dataset::{train_test_split, Dataset, SplitSpec};
use mgp_core::evolution::{evolve, EvolutionConfig, RunHistory};
use mgp_core::model::score;
use mgp_core::{FittedModel, Scores};

use crate::error::CliResult;

/// Seed of the validation split carved from a training part.
pub fn validation_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

pub fn split(ds: &Dataset<f64>, fraction: f64, seed: u64) -> CliResult<(Dataset<f64>, Dataset<f64>)> {
    let spec = SplitSpec {
        test_fraction: fraction,
        seed,
        ..SplitSpec::default()
    };
    Ok(train_test_split(ds, &spec)?)
}

pub struct RunOutcome {
    pub model: FittedModel<f64>,
    pub history: RunHistory,
    pub train: Scores,
    pub validation: Scores,
    pub test: Option<Scores>,
    pub seconds: f64,
}

/// Splits `train_all` into training and validation parts, evolves, and
/// scores the returned model on every part (and `test` if given).
pub fn run_once(
    cfg: &EvolutionConfig,
    train_all: &Dataset<f64>,
    validation_fraction: f64,
    test: Option<&Dataset<f64>>,
) -> CliResult<(RunOutcome, Dataset<f64>, Dataset<f64>)> {
    let start = Instant::now();
    let (train, val) = split(train_all, validation_fraction, validation_seed(cfg.seed))?;
    let (model, history) = evolve(cfg, &train, &val)?;
    let outcome = RunOutcome {
        train: score(&model, &train)?,
        validation: score(&model, &val)?,
        test: test.map(|t| score(&model, t)).transpose()?,
        model,
        history,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((outcome, train, val))
}
