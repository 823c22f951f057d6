//! `fit` and `predict`.

use std::io::Write;
use std::path::{Path, PathBuf};

use mgp_core::dataset::{load_csv_for_prediction, load_source, write_csv};
use mgp_core::model::mse;
use mgp_core::variation::CrossoverKind;
use mgp_core::{FittedModel, ModelDocument, Scores};
use serde::{Deserialize, Serialize};

use crate::config::{evolution_config, read_document, RunConfig};
use crate::error::{CliError, CliResult};
use crate::io::{create_dir, write_atomic, write_json};
use crate::runner::{run_once, split};

pub const MODEL_FILE: &str = "model.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const SCORES_FILE: &str = "scores.json";
pub const DEFAULT_OUT: &str = "mgp-out";

/// Contents of `scores.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoresReport {
    pub dataset: String,
    pub xo_type: CrossoverKind,
    pub seed: u64,
    pub generations: usize,
    pub train: Scores,
    pub validation: Scores,
    pub test: Scores,
    pub seconds: f64,
}

/// Evolves a model on `cfg` and writes model, history and scores into the
/// output directory, which is returned.
pub fn cmd_fit(cfg: &RunConfig) -> CliResult<(PathBuf, ScoresReport)> {
    cfg.validate()?;
    let ds = load_source::<f64>(&cfg.dataset, &cfg.target, cfg.samples, cfg.seed)?;
    let variation = cfg.variation.resolve(ds.n_attributes());
    let evo = evolution_config(&cfg.evolution, variation, cfg.seed)?;
    let (train_all, test) = split(&ds, cfg.split.test_fraction, cfg.seed)?;
    log::info!(
        "{}: {} rows ({} train+validation, {} test), {} attributes, {} crossover",
        cfg.dataset,
        ds.n_rows(),
        train_all.n_rows(),
        test.n_rows(),
        ds.n_attributes(),
        variation.xo_type
    );
    let (run, train, val) = run_once(&evo, &train_all, cfg.split.validation_fraction, Some(&test))?;
    let test_scores = run.test.expect("test set given");

    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    create_dir(&out)?;
    let mut doc = run.model.to_document(run.train);
    doc.validation_scores = Some(run.validation);
    doc.test_scores = Some(test_scores);
    write_json(&out.join(MODEL_FILE), &doc)?;

    let mut history = Vec::new();
    run.history.write_csv(&mut history)?;
    write_atomic(&out.join(HISTORY_FILE), &history)?;

    let report = ScoresReport {
        dataset: cfg.dataset.clone(),
        xo_type: variation.xo_type,
        seed: cfg.seed,
        generations: evo.generations,
        train: run.train,
        validation: run.validation,
        test: test_scores,
        seconds: run.seconds,
    };
    write_json(&out.join(SCORES_FILE), &report)?;

    if cfg.save_splits {
        for (name, part) in [("train.csv", &train), ("validation.csv", &val), ("test.csv", &test)] {
            let path = out.join(name);
            write_csv(part, &path).map_err(|e| CliError::Runtime(e.to_string()))?;
        }
    }
    log::info!(
        "test r2 {:.4}, test mse {:.6e}, complexity {}; wrote {}",
        test_scores.r2,
        test_scores.mse,
        test_scores.complexity,
        out.display()
    );
    Ok((out, report))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictReport {
    pub rows: usize,
    /// MSE against the target column when the data has one.
    pub mse: Option<f64>,
}

/// Applies a saved model to a CSV. Writes a one-column CSV (`prediction`) to
/// `out` (atomically) or to standard output.
pub fn cmd_predict(model: &Path, data: &Path, out: Option<&Path>) -> CliResult<PredictReport> {
    let doc: ModelDocument = read_document(model)?;
    let fm = FittedModel::<f64>::from_document(&doc)?;
    let (raw, has_target) = load_csv_for_prediction::<f64>(data, &doc.target)?;
    let ds = fm.align(&raw)?;
    let yhat = fm.predict(&ds)?;

    let mut text = String::from("prediction\n");
    for v in &yhat {
        text.push_str(&format!("{v:?}\n"));
    }
    match out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(format!("cannot write predictions: {e}")))?,
    }
    let mse = if has_target { Some(mse(&yhat, ds.y())?) } else { None };
    if let Some(m) = mse {
        log::info!("{} rows, mse {m:.6e}", yhat.len());
    }
    Ok(PredictReport { rows: yhat.len(), mse })
}
