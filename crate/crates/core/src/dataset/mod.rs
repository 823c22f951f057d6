//! Tabular regression data: loading, validation, splitting and the synthetic
//! problem catalog.

mod csv_io;
mod split;
mod synth;

pub use csv_io::{load_csv, load_csv_for_prediction, write_csv};
pub use split::{fold_indices, kfold, train_test_split, SplitSpec};
pub use synth::{catalog, synth_problem, SynthProblem};

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::Scalar;

/// Prefix selecting a synthetic catalog entry wherever a dataset path is accepted.
pub const SYNTH_PREFIX: &str = "synth:";

/// Attribute matrix `x` (N × d) with target vector `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    x: Matrix<T>,
    y: Vec<T>,
    attribute_names: Vec<String>,
    target_name: String,
}

impl<T: Scalar> Dataset<T> {
    /// Validates shape and finiteness.
    pub fn new(
        x: Matrix<T>,
        y: Vec<T>,
        attribute_names: Vec<String>,
        target_name: impl Into<String>,
    ) -> Result<Self> {
        if x.rows() == 0 || y.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if x.cols() == 0 {
            return Err(Error::InvalidDataset("no attribute columns".into()));
        }
        if x.rows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                got: y.len(),
            });
        }
        if attribute_names.len() != x.cols() {
            return Err(Error::DimensionMismatch {
                expected: x.cols(),
                got: attribute_names.len(),
            });
        }
        for (c, name) in attribute_names.iter().enumerate() {
            if let Some(r) = x.col(c).iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    line: r as u64 + 2,
                    column: name.clone(),
                });
            }
        }
        let target_name = target_name.into();
        if let Some(r) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                line: r as u64 + 2,
                column: target_name,
            });
        }
        Ok(Self {
            x,
            y,
            attribute_names,
            target_name,
        })
    }

    /// Convenience constructor naming attributes `x1..xd` and the target `y`.
    pub fn from_rows(rows: &[Vec<T>], y: Vec<T>) -> Result<Self> {
        let x = Matrix::from_rows(rows);
        let names = (1..=x.cols()).map(|i| format!("x{i}")).collect();
        Self::new(x, y, names, "y")
    }

    #[inline]
    pub fn x(&self) -> &Matrix<T> {
        &self.x
    }

    #[inline]
    pub fn y(&self) -> &[T] {
        &self.y
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    #[inline]
    pub fn n_attributes(&self) -> usize {
        self.x.cols()
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    /// Rows `idx` in the given order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            attribute_names: self.attribute_names.clone(),
            target_name: self.target_name.clone(),
        }
    }

    /// Converts element type, e.g. for running the engine in `f32`.
    pub fn cast<U: Scalar>(&self) -> Dataset<U> {
        let cols = self
            .x
            .columns()
            .map(|c| c.iter().map(|v| U::lit(v.as_f64())).collect())
            .collect();
        Dataset {
            x: Matrix::from_columns(self.n_rows(), cols),
            y: self.y.iter().map(|v| U::lit(v.as_f64())).collect(),
            attribute_names: self.attribute_names.clone(),
            target_name: self.target_name.clone(),
        }
    }
}

/// Resolves a dataset source: `synth:<name>` draws `synth_rows` rows from the
/// catalog with `seed`, anything else is read as a CSV path.
pub fn load_source<T: Scalar>(
    source: &str,
    target_column: &str,
    synth_rows: usize,
    seed: u64,
) -> Result<Dataset<T>> {
    match source.strip_prefix(SYNTH_PREFIX) {
        Some(name) => synth_problem(name, synth_rows, seed),
        None => load_csv(Path::new(source), target_column),
    }
}
