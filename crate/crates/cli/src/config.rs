//! JSON configuration documents. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use mgp_core::dataset::{catalog, SYNTH_PREFIX};
use mgp_core::evolution::EvolutionConfig;
use mgp_core::variation::{CrossoverKind, VariationConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub fn read_document<D: DeserializeOwned>(path: &Path) -> CliResult<D> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read config `{}`: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("config `{}`: {e}", path.display())))
}

fn default_target() -> String {
    "y".into()
}
fn default_samples() -> usize {
    500
}
fn default_fraction() -> f64 {
    0.25
}

/// Evolution settings shared by every document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionSection {
    pub population_size: usize,
    pub generations: usize,
    pub lambda: f64,
    pub gd_iters: usize,
    pub lr: f64,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        Self {
            population_size: 100,
            generations: 50,
            lambda: 1e-3,
            gd_iters: 10,
            lr: 0.1,
        }
    }
}

/// Variation settings; unset fields take the tuned values of `xo_type`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationSection {
    pub xo_type: CrossoverKind,
    pub p_crossover: Option<f64>,
    pub p_feature_xo: Option<f64>,
    pub feedback: Option<f64>,
    pub softmax: Option<bool>,
    pub max_depth: Option<usize>,
    pub max_dimensionality: Option<usize>,
}

impl Default for VariationSection {
    fn default() -> Self {
        Self {
            xo_type: CrossoverKind::StageXo,
            p_crossover: None,
            p_feature_xo: None,
            feedback: None,
            softmax: None,
            max_depth: None,
            max_dimensionality: None,
        }
    }
}

impl VariationSection {
    pub fn resolve(&self, n_attributes: usize) -> VariationConfig {
        let mut v = VariationConfig::tuned(self.xo_type, n_attributes);
        if let Some(p) = self.p_crossover {
            v.p_crossover = p;
        }
        if let Some(p) = self.p_feature_xo {
            v.p_feature_xo = p;
        }
        if let Some(g) = self.feedback {
            v.feedback_gamma = g;
        }
        if let Some(s) = self.softmax {
            v.softmax_norm = s;
        }
        if let Some(d) = self.max_depth {
            v.max_depth = d;
        }
        if let Some(m) = self.max_dimensionality {
            v.max_dimensionality = m;
        }
        v
    }
}

pub fn evolution_config(evo: &EvolutionSection, variation: VariationConfig, seed: u64) -> CliResult<EvolutionConfig> {
    let cfg = EvolutionConfig {
        population_size: evo.population_size,
        generations: evo.generations,
        variation,
        lambda: evo.lambda,
        gd_iters: evo.gd_iters,
        lr: evo.lr,
        seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn check_fraction(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("{name} = {v} must lie strictly between 0 and 1")))
    }
}

/// Hold-out fractions: `test_fraction` of the rows are set aside for the
/// final score, then `validation_fraction` of the remainder picks the
/// reported model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSection {
    pub test_fraction: f64,
    pub validation_fraction: f64,
}

impl Default for SplitSection {
    fn default() -> Self {
        Self {
            test_fraction: default_fraction(),
            validation_fraction: default_fraction(),
        }
    }
}

impl SplitSection {
    pub fn validate(&self) -> CliResult<()> {
        check_fraction("test_fraction", self.test_fraction)?;
        check_fraction("validation_fraction", self.validation_fraction)
    }
}

/// Document for `fit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// CSV path or `synth:<name>`.
    pub dataset: String,
    #[serde(default = "default_target")]
    pub target: String,
    /// Rows drawn for `synth:` datasets.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub variation: VariationSection,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Also write train.csv, validation.csv and test.csv.
    #[serde(default)]
    pub save_splits: bool,
}

impl RunConfig {
    pub fn new(dataset: impl Into<String>) -> Self {
        Self {
            dataset: dataset.into(),
            target: default_target(),
            samples: default_samples(),
            seed: 0,
            split: SplitSection::default(),
            evolution: EvolutionSection::default(),
            variation: VariationSection::default(),
            out: None,
            save_splits: false,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        check_source(&self.dataset)?;
        self.split.validate()
    }
}

/// Rejects unknown `synth:` names early.
pub fn check_source(source: &str) -> CliResult<()> {
    if let Some(name) = source.strip_prefix(SYNTH_PREFIX) {
        if !catalog().iter().any(|p| p.name == name) {
            let known: Vec<&str> = catalog().iter().map(|p| p.name).collect();
            return Err(CliError::Invalid(format!(
                "unknown problem `{name}` (known: {})",
                known.join(", ")
            )));
        }
    }
    Ok(())
}

/// The full catalog as `synth:` sources.
pub fn catalog_sources() -> Vec<String> {
    catalog().iter().map(|p| format!("{SYNTH_PREFIX}{}", p.name)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// k-fold cross validation; each fold is scored once.
    Kfold,
    /// A single train/test split per trial.
    Holdout,
}

/// Values tried per hyperparameter; the grid is their Cartesian product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub p_crossover: Vec<f64>,
    pub feedback: Vec<f64>,
    pub xo_type: Vec<CrossoverKind>,
    pub p_feature_xo: Vec<f64>,
    pub softmax: Vec<bool>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            p_crossover: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            feedback: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            xo_type: CrossoverKind::ALL.to_vec(),
            p_feature_xo: vec![0.5, 0.75, 1.0],
            softmax: vec![true, false],
        }
    }
}

/// One grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub xo_type: CrossoverKind,
    pub p_crossover: f64,
    pub p_feature_xo: f64,
    pub feedback: f64,
    pub softmax: bool,
}

impl GridPoint {
    pub fn variation(&self, n_attributes: usize) -> VariationConfig {
        let mut v = VariationConfig::tuned(self.xo_type, n_attributes);
        v.p_crossover = self.p_crossover;
        v.p_feature_xo = self.p_feature_xo;
        v.feedback_gamma = self.feedback;
        v.softmax_norm = self.softmax;
        v
    }

    /// Text used in journal keys; the float formatting is exact.
    pub fn key(&self) -> String {
        format!(
            "{}|{:?}|{:?}|{:?}|{}",
            self.xo_type, self.p_crossover, self.p_feature_xo, self.feedback, self.softmax
        )
    }
}

impl GridSection {
    /// Grid points in a fixed nesting order: xo_type, p_crossover,
    /// p_feature_xo, feedback, softmax.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &xo_type in &self.xo_type {
            for &p_crossover in &self.p_crossover {
                for &p_feature_xo in &self.p_feature_xo {
                    for &feedback in &self.feedback {
                        for &softmax in &self.softmax {
                            out.push(GridPoint {
                                xo_type,
                                p_crossover,
                                p_feature_xo,
                                feedback,
                                softmax,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> CliResult<()> {
        let lists = [
            ("p_crossover", &self.p_crossover),
            ("feedback", &self.feedback),
            ("p_feature_xo", &self.p_feature_xo),
        ];
        for (name, values) in lists {
            if values.is_empty() {
                return Err(CliError::Invalid(format!("grid.{name} is empty")));
            }
            if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(CliError::Invalid(format!("grid.{name} value {v} not in [0, 1]")));
            }
        }
        if self.xo_type.is_empty() || self.softmax.is_empty() {
            return Err(CliError::Invalid("grid.xo_type and grid.softmax must be non-empty".into()));
        }
        Ok(())
    }
}

fn default_problems() -> Vec<String> {
    catalog_sources()
}
fn default_trials() -> usize {
    1
}
fn default_folds() -> usize {
    5
}
fn default_experiment_samples() -> usize {
    300
}
fn default_max_jobs() -> usize {
    10_000
}
fn default_protocol() -> Protocol {
    Protocol::Kfold
}

/// Document for `experiment`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_problems")]
    pub problems: Vec<String>,
    #[serde(default = "default_target")]
    pub target: String,
    #[serde(default = "default_experiment_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_protocol")]
    pub protocol: Protocol,
    #[serde(default = "default_folds")]
    pub folds: usize,
    /// Used by the hold-out protocol; `validation_fraction` applies to both.
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub grid: GridSection,
    /// Upper bound on problems × grid points × trials.
    #[serde(default = "default_max_jobs")]
    pub max_jobs: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentConfig {
    pub fn n_jobs(&self) -> usize {
        self.problems.len() * self.grid.points().len() * self.trials
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.problems.is_empty() {
            return Err(CliError::Invalid("no problems given".into()));
        }
        for p in &self.problems {
            check_source(p)?;
        }
        if self.trials == 0 {
            return Err(CliError::Invalid("trials must be at least 1".into()));
        }
        if self.protocol == Protocol::Kfold && self.folds < 2 {
            return Err(CliError::Invalid("folds must be at least 2".into()));
        }
        self.split.validate()?;
        self.grid.validate()?;
        let jobs = self.n_jobs();
        if jobs > self.max_jobs {
            return Err(CliError::Invalid(format!(
                "{jobs} jobs exceed max_jobs = {}",
                self.max_jobs
            )));
        }
        Ok(())
    }
}

fn default_compare_trials() -> usize {
    10
}

/// Document for `compare-xo`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default = "default_problems")]
    pub problems: Vec<String>,
    #[serde(default = "default_target")]
    pub target: String,
    #[serde(default = "default_experiment_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_compare_trials")]
    pub trials: usize,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl CompareConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.problems.len() < 2 {
            return Err(CliError::Invalid("compare-xo needs at least two problems".into()));
        }
        for p in &self.problems {
            check_source(p)?;
        }
        if self.trials == 0 {
            return Err(CliError::Invalid("trials must be at least 1".into()));
        }
        self.split.validate()
    }
}
