use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Summary of one completed generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_train_mse: f64,
    pub median_train_mse: f64,
    pub median_complexity: f64,
    pub median_entanglement: f64,
    /// Lowest validation MSE seen so far, initial population included.
    pub best_validation_mse: f64,
    /// Offspring produced by feature-level crossover this generation.
    pub feature_xo_children: usize,
    /// Median entanglement of those children with two or more features; NaN if none.
    pub median_child_entanglement: f64,
}

/// Per-generation records of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    pub records: Vec<GenerationRecord>,
    /// Entanglement of every feature-crossover child with at least two features.
    pub child_entanglement: Vec<f64>,
    pub final_validation_mse: f64,
    pub final_complexity: usize,
}

pub const HISTORY_HEADER: [&str; 8] = [
    "generation",
    "best_train_mse",
    "median_train_mse",
    "median_complexity",
    "median_entanglement",
    "best_validation_mse",
    "feature_xo_children",
    "median_child_entanglement",
];

impl RunHistory {
    pub fn best_validation_trace(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.best_validation_mse).collect()
    }

    /// One CSV row per generation, columns as in [`HISTORY_HEADER`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Document(e.to_string());
        w.write_record(HISTORY_HEADER).map_err(csv_err)?;
        for r in &self.records {
            w.write_record([
                r.generation.to_string(),
                format!("{:?}", r.best_train_mse),
                format!("{:?}", r.median_train_mse),
                format!("{:?}", r.median_complexity),
                format!("{:?}", r.median_entanglement),
                format!("{:?}", r.best_validation_mse),
                r.feature_xo_children.to_string(),
                format!("{:?}", r.median_child_entanglement),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Document(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let h = RunHistory {
            records: vec![GenerationRecord {
                generation: 1,
                best_train_mse: 0.5,
                median_train_mse: 1.0,
                median_complexity: 7.0,
                median_entanglement: 0.25,
                best_validation_mse: 0.75,
                feature_xo_children: 3,
                median_child_entanglement: f64::NAN,
            }],
            ..Default::default()
        };
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), HISTORY_HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "1,0.5,1.0,7.0,0.25,0.75,3,NaN");
        assert!(lines.next().is_none());
    }
}
