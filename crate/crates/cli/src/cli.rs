//! Command-line arguments. Flags override fields of the `--config` document.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mgp_core::variation::CrossoverKind;

use crate::config::{read_document, CompareConfig, ExperimentConfig, Protocol, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "mgp", version, about = "Multidimensional genetic programming for symbolic regression")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Only log warnings and errors.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a model and write model.json, history.csv and scores.json.
    Fit(FitArgs),
    /// Apply a saved model to a CSV file.
    Predict(PredictArgs),
    /// Hyperparameter grid search with cross validation.
    Experiment(ExperimentArgs),
    /// Compare the three crossover kinds at their tuned settings.
    CompareXo(CompareArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV path or `synth:<name>`.
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub xo_type: Option<CrossoverKind>,
    #[arg(long)]
    pub population_size: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the train/validation/test parts as CSV.
    #[arg(long)]
    pub save_splits: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Output CSV; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated sources (CSV paths or `synth:<name>`).
    #[arg(long, value_delimiter = ',')]
    pub problems: Option<Vec<String>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_parser = parse_protocol)]
    pub protocol: Option<Protocol>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Ignore an existing journal and start over.
    #[arg(long)]
    pub fresh: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub problems: Option<Vec<String>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub population_size: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    match s {
        "kfold" => Ok(Protocol::Kfold),
        "holdout" => Ok(Protocol::Holdout),
        _ => Err(format!("unknown protocol `{s}` (kfold, holdout)")),
    }
}

impl FitArgs {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match (&self.config, &self.data) {
            (Some(path), _) => read_document::<RunConfig>(path)?,
            (None, Some(data)) => RunConfig::new(data.clone()),
            (None, None) => return Err(CliError::Invalid("give --config or --data".into())),
        };
        if let Some(d) = &self.data {
            cfg.dataset = d.clone();
        }
        if let Some(t) = &self.target {
            cfg.target = t.clone();
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if let Some(k) = self.xo_type {
            cfg.variation.xo_type = k;
        }
        if let Some(n) = self.population_size {
            cfg.evolution.population_size = n;
        }
        if let Some(n) = self.generations {
            cfg.evolution.generations = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        cfg.save_splits |= self.save_splits;
        Ok(cfg)
    }
}

impl ExperimentArgs {
    pub fn resolve(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => read_document::<ExperimentConfig>(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(p) = &self.problems {
            cfg.problems = p.clone();
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(p) = self.protocol {
            cfg.protocol = p;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        Ok(cfg)
    }
}

impl CompareArgs {
    pub fn resolve(&self) -> CliResult<CompareConfig> {
        let mut cfg = match &self.config {
            Some(path) => read_document::<CompareConfig>(path)?,
            None => CompareConfig::default(),
        };
        if let Some(p) = &self.problems {
            cfg.problems = p.clone();
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(n) = self.population_size {
            cfg.evolution.population_size = n;
        }
        if let Some(n) = self.generations {
            cfg.evolution.generations = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        Ok(cfg)
    }
}
