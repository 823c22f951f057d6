use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::fit::FittedModel;
use crate::model::metrics::Scores;
use crate::model::normalize::FeatureStats;
use crate::program::{parse, render, Individual};
use crate::Scalar;

pub const MODEL_FORMAT: &str = "mgp-model/1";

/// JSON form of a fitted model. Field names are part of the file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format: String,
    /// Attribute names in training column order; `x<i>` in a feature refers
    /// to the i-th entry (1-based).
    pub attributes: Vec<String>,
    pub target: String,
    pub features: Vec<String>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub feature_means: Vec<f64>,
    pub feature_stds: Vec<f64>,
    pub constant_features: Vec<bool>,
    pub lambda: f64,
    pub complexity: usize,
    pub train_scores: Scores,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation_scores: Option<Scores>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_scores: Option<Scores>,
}

impl<T: Scalar> FittedModel<T> {
    pub fn to_document(&self, train_scores: Scores) -> ModelDocument {
        let ind = &self.individual;
        ModelDocument {
            format: MODEL_FORMAT.to_owned(),
            attributes: self.attribute_names.clone(),
            target: self.target_name.clone(),
            features: ind.programs.iter().map(render).collect(),
            coefficients: ind.coefficients.iter().map(|v| v.as_f64()).collect(),
            intercept: ind.intercept.as_f64(),
            feature_means: ind.feature_stats.iter().map(|s| s.mean.as_f64()).collect(),
            feature_stds: ind.feature_stats.iter().map(|s| s.std.as_f64()).collect(),
            constant_features: ind.feature_stats.iter().map(|s| s.constant).collect(),
            lambda: self.lambda.as_f64(),
            complexity: ind.complexity,
            train_scores,
            validation_scores: None,
            test_scores: None,
        }
    }

    pub fn from_document(doc: &ModelDocument) -> Result<Self> {
        if doc.format != MODEL_FORMAT {
            return Err(Error::Document(format!("unsupported format `{}`", doc.format)));
        }
        let m = doc.features.len();
        if m == 0 {
            return Err(Error::Document("no features".into()));
        }
        for (name, len) in [
            ("coefficients", doc.coefficients.len()),
            ("feature_means", doc.feature_means.len()),
            ("feature_stds", doc.feature_stds.len()),
            ("constant_features", doc.constant_features.len()),
        ] {
            if len != m {
                return Err(Error::Document(format!("{name} has {len} entries for {m} features")));
            }
        }
        let programs = doc
            .features
            .iter()
            .map(|f| parse::<T>(f))
            .collect::<Result<Vec<_>>>()?;
        for p in &programs {
            p.check_attributes(doc.attributes.len())?;
        }
        let mut individual = Individual::new(programs);
        individual.coefficients = doc.coefficients.iter().map(|&v| T::lit(v)).collect();
        individual.intercept = T::lit(doc.intercept);
        individual.fitness_mse = T::lit(doc.train_scores.mse);
        individual.entanglement = T::lit(doc.train_scores.entanglement);
        individual.feature_stats = (0..m)
            .map(|j| FeatureStats {
                mean: T::lit(doc.feature_means[j]),
                std: T::lit(doc.feature_stds[j]),
                constant: doc.constant_features[j],
            })
            .collect();
        Ok(Self {
            individual,
            lambda: T::lit(doc.lambda),
            attribute_names: doc.attributes.clone(),
            target_name: doc.target.clone(),
        })
    }

    /// Attribute names referenced by at least one feature.
    pub fn referenced_attributes(&self) -> Vec<&str> {
        let mut used = vec![false; self.attribute_names.len()];
        for p in &self.individual.programs {
            for n in p.nodes() {
                if let crate::program::Node::Var(j) = n {
                    used[*j] = true;
                }
            }
        }
        self.attribute_names
            .iter()
            .zip(used)
            .filter(|(_, u)| *u)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// Reorders the columns of `data` by name into the training layout.
    ///
    /// Every referenced attribute must be present; unreferenced ones are
    /// zero-filled when absent. The target column, if present, is kept.
    pub fn align(&self, data: &Dataset<T>) -> Result<Dataset<T>> {
        let referenced = self.referenced_attributes();
        let n = data.n_rows();
        let mut cols = Vec::with_capacity(self.attribute_names.len());
        for name in &self.attribute_names {
            match data.attribute_names().iter().position(|a| a == name) {
                Some(j) => cols.push(data.x().col(j).to_vec()),
                None if referenced.contains(&name.as_str()) => {
                    return Err(Error::InvalidDataset(format!("missing attribute `{name}`")))
                }
                None => cols.push(vec![T::zero(); n]),
            }
        }
        Dataset::new(
            Matrix::from_columns(n, cols),
            data.y().to_vec(),
            self.attribute_names.clone(),
            data.target_name(),
        )
    }
}
