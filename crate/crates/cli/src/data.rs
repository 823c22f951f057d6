use std::path::Path;

use mgp_core::dataset::{load_csv, synth_problem, Dataset, SYNTH_PREFIX};

use crate::error::CliResult;

/// A problem resolved once up front: catalog entries are redrawn per trial,
/// tables are read once.
pub enum Problem {
    Synth { name: String, samples: usize },
    Table(Dataset<f64>),
}

impl Problem {
    pub fn resolve(source: &str, target: &str, samples: usize) -> CliResult<Self> {
        Ok(match source.strip_prefix(SYNTH_PREFIX) {
            Some(name) => {
                // fail early on unknown names or bad sizes
                synth_problem::<f64>(name, samples, 0)?;
                Problem::Synth {
                    name: name.to_owned(),
                    samples,
                }
            }
            None => Problem::Table(load_csv(Path::new(source), target)?),
        })
    }

    pub fn dataset(&self, seed: u64) -> CliResult<Dataset<f64>> {
        match self {
            Problem::Synth { name, samples } => Ok(synth_problem(name, *samples, seed)?),
            Problem::Table(ds) => Ok(ds.clone()),
        }
    }
}
