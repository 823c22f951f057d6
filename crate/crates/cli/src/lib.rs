//! Command-line front end for `mgp-core`: single fits, prediction, the
//! hyperparameter grid experiment and the crossover comparison.
//!
//! Output files and their columns:
//!
//! * `fit`: `model.json` (see [`mgp_core::ModelDocument`]), `history.csv`
//!   ([`mgp_core::evolution::HISTORY_HEADER`]), `scores.json`
//!   ([`fit::ScoresReport`]); with `save_splits`, the data parts as CSV.
//! * `predict`: one `prediction` column, one row per input row.
//! * `experiment`: `results.csv` ([`experiment::RESULTS_HEADER`]),
//!   `best_config.csv` ([`experiment::BEST_HEADER`]), `journal.jsonl` and,
//!   if any job failed, `failures.csv`.
//! * `compare-xo`: `compare.csv` ([`compare::COMPARE_HEADER`]) and
//!   `compare_summary.csv` ([`compare::SUMMARY_HEADER`]).

pub mod cli;
pub mod compare;
pub mod config;
mod data;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod io;
pub mod runner;

pub use compare::cmd_compare_xo;
pub use error::{CliError, CliResult};
pub use experiment::cmd_experiment;
pub use fit::{cmd_fit, cmd_predict};

use cli::{Cli, Command};

/// Runs a parsed command line; returns the exit status on completion.
pub fn run(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Fit(args) => {
            cmd_fit(&args.resolve()?)?;
            Ok(0)
        }
        Command::Predict(args) => {
            cmd_predict(&args.model, &args.data, args.out.as_deref())?;
            Ok(0)
        }
        Command::Experiment(args) => {
            let report = cmd_experiment(&args.resolve()?, !args.fresh)?;
            Ok(if report.failed > 0 { 1 } else { 0 })
        }
        Command::CompareXo(args) => {
            let report = cmd_compare_xo(&args.resolve()?)?;
            Ok(if report.failed > 0 { 1 } else { 0 })
        }
    }
}
