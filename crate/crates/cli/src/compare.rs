//! `compare-xo`: the three crossover kinds at their tuned settings on a set
//! of problems, hold-out scores per trial.

use std::path::PathBuf;
use std::sync::Mutex;

use mgp_core::evolution::EvolutionConfig;
use mgp_core::variation::{CrossoverKind, VariationConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{evolution_config, CompareConfig};
use crate::data::Problem;
use crate::error::CliResult;
use crate::io::{create_dir, csv_bytes, write_atomic};
use crate::runner::{run_once, split};

pub const COMPARE_FILE: &str = "compare.csv";
pub const SUMMARY_FILE: &str = "compare_summary.csv";
pub const DEFAULT_OUT: &str = "mgp-compare";

pub const COMPARE_HEADER: [&str; 12] = [
    "problem",
    "xo_type",
    "trial",
    "train_mse",
    "train_r2",
    "test_mse",
    "test_r2",
    "entanglement",
    "complexity",
    "feature_xo_children",
    "median_child_entanglement",
    "seconds",
];

pub const SUMMARY_HEADER: [&str; 6] = [
    "problem",
    "xo_type",
    "trials",
    "mean_test_r2",
    "median_test_r2",
    "median_child_entanglement",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub problem: String,
    pub xo_type: CrossoverKind,
    pub trial: usize,
    pub train_mse: f64,
    pub train_r2: f64,
    pub test_mse: f64,
    pub test_r2: f64,
    /// Of the returned model on the test part.
    pub entanglement: f64,
    pub complexity: usize,
    pub feature_xo_children: usize,
    /// Over all feature-crossover children of the run with two or more features.
    pub median_child_entanglement: f64,
    pub seconds: f64,
    #[serde(skip)]
    pub child_entanglement: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub problem: String,
    pub xo_type: CrossoverKind,
    pub trials: usize,
    pub mean_test_r2: f64,
    pub median_test_r2: f64,
    /// Pooled over every trial's feature-crossover children.
    pub median_child_entanglement: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub out: PathBuf,
    pub rows: Vec<CompareRow>,
    pub summary: Vec<SummaryRow>,
    pub failed: usize,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Settings of one comparison run.
pub fn compare_config(cfg: &CompareConfig, kind: CrossoverKind, n_attributes: usize, seed: u64) -> CliResult<EvolutionConfig> {
    evolution_config(&cfg.evolution, VariationConfig::tuned(kind, n_attributes), seed)
}

fn run_trial(cfg: &CompareConfig, problem: &Problem, name: &str, kind: CrossoverKind, trial: usize) -> CliResult<CompareRow> {
    let seed = cfg.seed.wrapping_add(trial as u64);
    let ds = problem.dataset(seed)?;
    let evo = compare_config(cfg, kind, ds.n_attributes(), seed)?;
    let (train_all, test) = split(&ds, cfg.split.test_fraction, seed)?;
    let (run, _, _) = run_once(&evo, &train_all, cfg.split.validation_fraction, Some(&test))?;
    let t = run.test.expect("test set given");
    let children: usize = run.history.records.iter().map(|r| r.feature_xo_children).sum();
    Ok(CompareRow {
        problem: name.to_owned(),
        xo_type: kind,
        trial,
        train_mse: run.train.mse,
        train_r2: run.train.r2,
        test_mse: t.mse,
        test_r2: t.r2,
        entanglement: t.entanglement,
        complexity: t.complexity,
        feature_xo_children: children,
        median_child_entanglement: median(run.history.child_entanglement.clone()),
        seconds: run.seconds,
        child_entanglement: run.history.child_entanglement,
    })
}

/// Runs every (problem, crossover kind, trial); trial `t` uses seed
/// `seed + t` for data, split and evolution, shared by the three kinds.
pub fn cmd_compare_xo(cfg: &CompareConfig) -> CliResult<CompareReport> {
    cfg.validate()?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    create_dir(&out)?;
    let problems = cfg
        .problems
        .iter()
        .map(|p| Problem::resolve(p, &cfg.target, cfg.samples))
        .collect::<CliResult<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for pi in 0..problems.len() {
        for kind in CrossoverKind::ALL {
            for trial in 0..cfg.trials {
                jobs.push((pi, kind, trial));
            }
        }
    }
    let finished = Mutex::new(0usize);
    let results: Vec<CliResult<CompareRow>> = jobs
        .par_iter()
        .map(|&(pi, kind, trial)| {
            let name = &cfg.problems[pi];
            let res = run_trial(cfg, &problems[pi], name, kind, trial);
            let k = {
                let mut n = finished.lock().expect("progress lock");
                *n += 1;
                *n
            };
            match &res {
                Ok(r) => log::info!("[{k}/{}] {name} {kind} trial {trial}: test r2 {:.4}", jobs.len(), r.test_r2),
                Err(e) => log::error!("[{k}/{}] {name} {kind} trial {trial} failed: {e}", jobs.len()),
            }
            res
        })
        .collect();

    let mut rows = Vec::new();
    let mut failed = 0;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(_) => failed += 1,
        }
    }

    let mut summary = Vec::new();
    for name in &cfg.problems {
        for kind in CrossoverKind::ALL {
            let mine: Vec<&CompareRow> = rows.iter().filter(|r| &r.problem == name && r.xo_type == kind).collect();
            if mine.is_empty() {
                continue;
            }
            let r2: Vec<f64> = mine.iter().map(|r| r.test_r2).collect();
            summary.push(SummaryRow {
                problem: name.clone(),
                xo_type: kind,
                trials: mine.len(),
                mean_test_r2: r2.iter().sum::<f64>() / r2.len() as f64,
                median_test_r2: median(r2),
                median_child_entanglement: median(mine.iter().flat_map(|r| r.child_entanglement.iter().copied()).collect()),
            });
        }
    }

    write_atomic(&out.join(COMPARE_FILE), &csv_bytes(&COMPARE_HEADER, &rows)?)?;
    write_atomic(&out.join(SUMMARY_FILE), &csv_bytes(&SUMMARY_HEADER, &summary)?)?;
    if failed > 0 {
        log::error!("{failed} of {} runs failed", jobs.len());
    }
    Ok(CompareReport {
        out,
        rows,
        summary,
        failed,
    })
}

impl CompareReport {
    /// Problems on which `a`'s mean test R² is at least `b`'s.
    pub fn wins(&self, a: CrossoverKind, b: CrossoverKind) -> Vec<(String, f64, f64)> {
        let mut out = Vec::new();
        for s in self.summary.iter().filter(|s| s.xo_type == a) {
            if let Some(o) = self.summary.iter().find(|o| o.problem == s.problem && o.xo_type == b) {
                if s.mean_test_r2 >= o.mean_test_r2 {
                    out.push((s.problem.clone(), s.mean_test_r2, o.mean_test_r2));
                }
            }
        }
        out
    }
}
