//! `experiment`: hyperparameter grid with cross validation, results journal
//! and per-crossover best configuration.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use mgp_core::dataset::{kfold, SplitSpec};
use mgp_core::variation::CrossoverKind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{evolution_config, ExperimentConfig, GridPoint, Protocol};
use crate::data::Problem;
use crate::error::{CliError, CliResult};
use crate::io::{create_dir, csv_bytes, write_atomic};
use crate::runner::{run_once, split};

pub const RESULTS_FILE: &str = "results.csv";
pub const BEST_FILE: &str = "best_config.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const JOURNAL_FILE: &str = "journal.jsonl";
pub const DEFAULT_OUT: &str = "mgp-experiment";

pub const RESULTS_HEADER: [&str; 15] = [
    "problem",
    "xo_type",
    "p_crossover",
    "p_feature_xo",
    "feedback",
    "softmax",
    "trial",
    "fold",
    "train_mse",
    "train_r2",
    "test_mse",
    "test_r2",
    "entanglement",
    "complexity",
    "seconds",
];

pub const BEST_HEADER: [&str; 8] = [
    "xo_type",
    "p_crossover",
    "p_feature_xo",
    "feedback",
    "softmax",
    "mean_test_r2",
    "mean_test_mse",
    "rows",
];

pub const FAILURES_HEADER: [&str; 4] = ["problem", "grid_point", "trial", "error"];

/// One scored fold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub problem: String,
    pub xo_type: CrossoverKind,
    pub p_crossover: f64,
    pub p_feature_xo: f64,
    pub feedback: f64,
    pub softmax: bool,
    pub trial: usize,
    pub fold: usize,
    pub train_mse: f64,
    pub train_r2: f64,
    pub test_mse: f64,
    pub test_r2: f64,
    pub entanglement: f64,
    pub complexity: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestRow {
    pub xo_type: CrossoverKind,
    pub p_crossover: f64,
    pub p_feature_xo: f64,
    pub feedback: f64,
    pub softmax: bool,
    pub mean_test_r2: f64,
    pub mean_test_mse: f64,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
enum JournalEntry {
    Config { config: serde_json::Value },
    Ok { key: String, rows: Vec<ResultRow> },
    Failed { key: String, error: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentReport {
    pub out: PathBuf,
    pub jobs: usize,
    /// Jobs taken from an existing journal instead of being run.
    pub resumed: usize,
    pub failed: usize,
    pub rows: usize,
}

struct Job {
    problem: usize,
    point: usize,
    trial: usize,
    key: String,
}

fn job_key(problem: &str, point: &GridPoint, trial: usize) -> String {
    format!("{problem}|{}|{trial}", point.key())
}

/// Configuration fields that must match for a journal to be reused.
fn journal_identity(cfg: &ExperimentConfig) -> serde_json::Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    if let Some(m) = v.as_object_mut() {
        m.remove("out");
        m.remove("max_jobs");
    }
    v
}

/// Reads completed jobs from an existing journal. Failed jobs are not
/// considered done; a truncated final line is ignored.
fn read_journal(path: &Path, identity: &serde_json::Value) -> CliResult<HashMap<String, Vec<ResultRow>>> {
    let mut done = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(CliError::Runtime(format!("cannot read `{}`: {e}", path.display()))),
    };
    let mut first = true;
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| CliError::Runtime(format!("cannot read `{}`: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let Ok(entry) = serde_json::from_str::<JournalEntry>(&line) else {
            log::warn!("ignoring unreadable journal line in {}", path.display());
            continue;
        };
        match entry {
            JournalEntry::Config { config } => {
                if &config != identity {
                    return Err(CliError::Invalid(format!(
                        "`{}` was written for a different configuration; use another output directory",
                        path.display()
                    )));
                }
            }
            _ if first => {
                return Err(CliError::Invalid(format!("`{}` lacks a configuration header", path.display())));
            }
            JournalEntry::Ok { key, rows } => {
                done.insert(key, rows);
            }
            JournalEntry::Failed { .. } => {}
        }
        first = false;
    }
    Ok(done)
}

fn open_journal(path: &Path, identity: &serde_json::Value, fresh: bool) -> CliResult<File> {
    let io_err = |e| CliError::output(path, e);
    let mut f = OpenOptions::new().create(true).read(true).append(true).open(path).map_err(io_err)?;
    let len = f.metadata().map_err(io_err)?.len();
    if fresh || len == 0 {
        f.set_len(0).map_err(io_err)?;
        let header = serde_json::to_string(&JournalEntry::Config {
            config: identity.clone(),
        })
        .expect("journal entry serializes");
        writeln!(f, "{header}").map_err(io_err)?;
    } else {
        // terminate a line cut short by an interruption
        let mut last = [0u8; 1];
        f.seek(SeekFrom::End(-1)).map_err(io_err)?;
        f.read_exact(&mut last).map_err(io_err)?;
        if last[0] != b'\n' {
            writeln!(f).map_err(io_err)?;
        }
    }
    f.flush().map_err(io_err)?;
    Ok(f)
}

fn run_job(cfg: &ExperimentConfig, problem: &Problem, name: &str, point: &GridPoint, trial: usize) -> CliResult<Vec<ResultRow>> {
    let seed = cfg.seed.wrapping_add(trial as u64);
    let ds = problem.dataset(seed)?;
    let evo = evolution_config(&cfg.evolution, point.variation(ds.n_attributes()), seed)?;
    let parts = match cfg.protocol {
        Protocol::Kfold => kfold(
            &ds,
            &SplitSpec {
                folds: cfg.folds,
                seed,
                ..SplitSpec::default()
            },
        )?,
        Protocol::Holdout => vec![split(&ds, cfg.split.test_fraction, seed)?],
    };
    let mut rows = Vec::with_capacity(parts.len());
    for (fold, (train, test)) in parts.iter().enumerate() {
        let (run, _, _) = run_once(&evo, train, cfg.split.validation_fraction, Some(test))?;
        let t = run.test.expect("test set given");
        rows.push(ResultRow {
            problem: name.to_owned(),
            xo_type: point.xo_type,
            p_crossover: point.p_crossover,
            p_feature_xo: point.p_feature_xo,
            feedback: point.feedback,
            softmax: point.softmax,
            trial,
            fold,
            train_mse: run.train.mse,
            train_r2: run.train.r2,
            test_mse: t.mse,
            test_r2: t.r2,
            entanglement: t.entanglement,
            complexity: t.complexity,
            seconds: run.seconds,
        });
    }
    Ok(rows)
}

/// Best grid point per crossover kind by mean test R² over all rows of that
/// point; ties go to the earlier grid point.
pub fn best_configurations(points: &[GridPoint], rows: &[ResultRow]) -> Vec<BestRow> {
    let mut out: Vec<BestRow> = Vec::new();
    for kind in CrossoverKind::ALL {
        let mut best: Option<BestRow> = None;
        for p in points.iter().filter(|p| p.xo_type == kind) {
            let mine: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| {
                    r.xo_type == p.xo_type
                        && r.p_crossover == p.p_crossover
                        && r.p_feature_xo == p.p_feature_xo
                        && r.feedback == p.feedback
                        && r.softmax == p.softmax
                })
                .collect();
            if mine.is_empty() {
                continue;
            }
            let n = mine.len() as f64;
            let cand = BestRow {
                xo_type: p.xo_type,
                p_crossover: p.p_crossover,
                p_feature_xo: p.p_feature_xo,
                feedback: p.feedback,
                softmax: p.softmax,
                mean_test_r2: mine.iter().map(|r| r.test_r2).sum::<f64>() / n,
                mean_test_mse: mine.iter().map(|r| r.test_mse).sum::<f64>() / n,
                rows: mine.len(),
            };
            if best.as_ref().map_or(true, |b| cand.mean_test_r2 > b.mean_test_r2) {
                best = Some(cand);
            }
        }
        out.extend(best);
    }
    out
}

#[derive(Serialize)]
struct FailureRow<'a> {
    problem: &'a str,
    grid_point: String,
    trial: usize,
    error: String,
}

/// Runs every (problem, grid point, trial) job not already in the journal,
/// `cfg.protocol` deciding the folds. Failed jobs are logged, recorded in
/// `failures.csv` and counted in the report; the others still run.
pub fn cmd_experiment(cfg: &ExperimentConfig, resume: bool) -> CliResult<ExperimentReport> {
    cfg.validate()?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    create_dir(&out)?;
    let problems = cfg
        .problems
        .iter()
        .map(|p| Problem::resolve(p, &cfg.target, cfg.samples))
        .collect::<CliResult<Vec<_>>>()?;
    let points = cfg.grid.points();

    let identity = journal_identity(cfg);
    let journal_path = out.join(JOURNAL_FILE);
    let mut done = if resume {
        read_journal(&journal_path, &identity)?
    } else {
        HashMap::new()
    };
    let journal = Mutex::new(open_journal(&journal_path, &identity, !resume)?);

    let mut jobs = Vec::new();
    for (pi, name) in cfg.problems.iter().enumerate() {
        for (gi, point) in points.iter().enumerate() {
            for trial in 0..cfg.trials {
                jobs.push(Job {
                    problem: pi,
                    point: gi,
                    trial,
                    key: job_key(name, point, trial),
                });
            }
        }
    }
    let total = jobs.len();
    let pending: Vec<&Job> = jobs.iter().filter(|j| !done.contains_key(&j.key)).collect();
    let resumed = total - pending.len();
    if resumed > 0 {
        log::info!("resuming: {resumed} of {total} jobs already in the journal");
    }

    let finished = Mutex::new(0usize);
    let outcomes: Vec<(String, CliResult<Vec<ResultRow>>)> = pending
        .par_iter()
        .map(|job| {
            let name = &cfg.problems[job.problem];
            let res = run_job(cfg, &problems[job.problem], name, &points[job.point], job.trial);
            let entry = match &res {
                Ok(rows) => JournalEntry::Ok {
                    key: job.key.clone(),
                    rows: rows.clone(),
                },
                Err(e) => JournalEntry::Failed {
                    key: job.key.clone(),
                    error: e.to_string(),
                },
            };
            let line = serde_json::to_string(&entry).expect("journal entry serializes");
            let written = {
                let mut f = journal.lock().expect("journal lock");
                writeln!(f, "{line}").and_then(|_| f.flush())
            };
            let res = match written {
                Ok(()) => res,
                Err(e) => Err(CliError::output(&journal_path, e)),
            };
            let k = {
                let mut n = finished.lock().expect("progress lock");
                *n += 1;
                *n
            };
            match &res {
                Ok(rows) => {
                    let r2 = rows.iter().map(|r| r.test_r2).sum::<f64>() / rows.len() as f64;
                    log::info!("[{k}/{}] {}: mean test r2 {r2:.4}", pending.len(), job.key);
                }
                Err(e) => log::error!("[{k}/{}] {} failed: {e}", pending.len(), job.key),
            }
            (job.key.clone(), res)
        })
        .collect();

    let mut failures = Vec::new();
    for ((key, res), job) in outcomes.into_iter().zip(&pending) {
        match res {
            Ok(rows) => {
                done.insert(key, rows);
            }
            Err(e) => failures.push(FailureRow {
                problem: &cfg.problems[job.problem],
                grid_point: points[job.point].key(),
                trial: job.trial,
                error: e.to_string(),
            }),
        }
    }

    let rows: Vec<ResultRow> = jobs
        .iter()
        .filter_map(|j| done.get(&j.key))
        .flat_map(|r| r.iter().cloned())
        .collect();
    write_atomic(&out.join(RESULTS_FILE), &csv_bytes(&RESULTS_HEADER, &rows)?)?;
    let best = best_configurations(&points, &rows);
    write_atomic(&out.join(BEST_FILE), &csv_bytes(&BEST_HEADER, &best)?)?;
    let failures_path = out.join(FAILURES_FILE);
    if failures.is_empty() {
        if failures_path.exists() {
            std::fs::remove_file(&failures_path).map_err(|e| CliError::output(&failures_path, e))?;
        }
    } else {
        write_atomic(&failures_path, &csv_bytes(&FAILURES_HEADER, &failures)?)?;
    }
    for b in &best {
        log::info!(
            "best {}: p_crossover {}, p_feature_xo {}, feedback {}, softmax {} (mean test r2 {:.4})",
            b.xo_type,
            b.p_crossover,
            b.p_feature_xo,
            b.feedback,
            b.softmax,
            b.mean_test_r2
        );
    }
    Ok(ExperimentReport {
        out,
        jobs: total,
        resumed,
        failed: failures.len(),
        rows: rows.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(kind: CrossoverKind, pc: f64, r2: f64) -> ResultRow {
        ResultRow {
            problem: "p".into(),
            xo_type: kind,
            p_crossover: pc,
            p_feature_xo: 0.5,
            feedback: 0.0,
            softmax: false,
            trial: 0,
            fold: 0,
            train_mse: 0.0,
            train_r2: 1.0,
            test_mse: 1.0 - r2,
            test_r2: r2,
            entanglement: 0.0,
            complexity: 1,
            seconds: 0.0,
        }
    }

    #[test]
    fn best_picks_max_mean_r2_per_kind() {
        let grid = crate::config::GridSection {
            p_crossover: vec![0.25, 0.75],
            feedback: vec![0.0],
            xo_type: vec![CrossoverKind::Standard, CrossoverKind::StageXo],
            p_feature_xo: vec![0.5],
            softmax: vec![false],
        };
        let rows = vec![
            row(CrossoverKind::Standard, 0.25, 0.9),
            row(CrossoverKind::Standard, 0.25, 0.7),
            row(CrossoverKind::Standard, 0.75, 0.85),
            row(CrossoverKind::StageXo, 0.25, 0.5),
            row(CrossoverKind::StageXo, 0.75, 0.5),
        ];
        let best = best_configurations(&grid.points(), &rows);
        assert_eq!(best.len(), 2);
        assert_eq!((best[0].xo_type, best[0].p_crossover, best[0].rows), (CrossoverKind::Standard, 0.75, 1));
        // tie keeps the earlier grid point
        assert_eq!((best[1].xo_type, best[1].p_crossover), (CrossoverKind::StageXo, 0.25));
    }

    #[test]
    fn journal_rejects_other_configuration() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(JOURNAL_FILE);
        let a = journal_identity(&ExperimentConfig::default());
        drop(open_journal(&path, &a, true).unwrap());
        assert!(read_journal(&path, &a).unwrap().is_empty());
        let other = ExperimentConfig {
            trials: 3,
            ..ExperimentConfig::default()
        };
        assert!(matches!(read_journal(&path, &journal_identity(&other)), Err(CliError::Invalid(_))));
    }

    #[test]
    fn journal_skips_truncated_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(JOURNAL_FILE);
        let id = journal_identity(&ExperimentConfig::default());
        let mut f = open_journal(&path, &id, true).unwrap();
        let ok = JournalEntry::Ok {
            key: "k".into(),
            rows: vec![row(CrossoverKind::ResXo, 0.5, 0.3)],
        };
        writeln!(f, "{}", serde_json::to_string(&ok).unwrap()).unwrap();
        write!(f, "{{\"status\":\"ok\",\"key\":\"half").unwrap();
        drop(f);
        let done = read_journal(&path, &id).unwrap();
        assert_eq!(done.len(), 1);
        drop(open_journal(&path, &id, false).unwrap());
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n'));
    }
}
