use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which operator performs feature-level crossover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverKind {
    /// Swap one feature between parents.
    Standard,
    /// Replace a feature with the donor feature best correlated with the residual.
    #[serde(rename = "resxo")]
    ResXo,
    /// Build the child by forward stagewise selection over both parents' features.
    #[serde(rename = "stagexo")]
    StageXo,
}

impl CrossoverKind {
    pub const ALL: [CrossoverKind; 3] = [CrossoverKind::Standard, CrossoverKind::ResXo, CrossoverKind::StageXo];

    pub fn label(self) -> &'static str {
        match self {
            CrossoverKind::Standard => "standard",
            CrossoverKind::ResXo => "resxo",
            CrossoverKind::StageXo => "stagexo",
        }
    }
}

impl std::str::FromStr for CrossoverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CrossoverKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown crossover type `{s}` (standard, resxo, stagexo)")))
    }
}

impl std::fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Variation hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationConfig {
    /// Probability of crossover; mutation otherwise.
    pub p_crossover: f64,
    /// Probability that a crossover works at feature level; subtree crossover otherwise.
    pub p_feature_xo: f64,
    pub xo_type: CrossoverKind,
    /// Blend between coefficient feedback and uniform feature choice.
    pub feedback_gamma: f64,
    pub softmax_norm: bool,
    pub max_depth: usize,
    pub max_dimensionality: usize,
}

pub const DEFAULT_MAX_DEPTH: usize = 6;

/// `min(50, 2d)`.
pub fn default_max_dimensionality(d: usize) -> usize {
    (2 * d).min(50)
}

impl VariationConfig {
    /// Best settings per crossover kind from the hyperparameter study:
    /// crossover 0.75 everywhere, feedback 0.25/0/0.25, feature crossover
    /// 0.75/0.5/0.5 (standard/resxo/stagexo), softmax off.
    pub fn tuned(xo_type: CrossoverKind, n_attributes: usize) -> Self {
        let (feedback_gamma, p_feature_xo) = match xo_type {
            CrossoverKind::Standard => (0.25, 0.75),
            CrossoverKind::ResXo => (0.0, 0.5),
            CrossoverKind::StageXo => (0.25, 0.5),
        };
        Self {
            p_crossover: 0.75,
            p_feature_xo,
            xo_type,
            feedback_gamma,
            softmax_norm: false,
            max_depth: DEFAULT_MAX_DEPTH,
            max_dimensionality: default_max_dimensionality(n_attributes),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_crossover", self.p_crossover),
            ("p_feature_xo", self.p_feature_xo),
            ("feedback", self.feedback_gamma),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} not in [0, 1]")));
            }
        }
        if self.max_depth < 1 {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        if self.max_dimensionality < 1 {
            return Err(Error::Config("max_dimensionality must be at least 1".into()));
        }
        Ok(())
    }
}
