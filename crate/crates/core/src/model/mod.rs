//! Linear models over evolved features: normalization, ridge regression,
//! weight refinement, prediction and scoring.

mod document;
mod fit;
mod metrics;
mod normalize;
mod ridge;

pub use document::{ModelDocument, MODEL_FORMAT};
pub(crate) use fit::linear_prediction;
pub use fit::{fit_individual, fit_with_predictions, FitSettings, FittedModel};
pub use metrics::{entanglement, mse, pearson, r2, Entanglement, Scores};
pub use normalize::{normalize_features, FeatureStats};
pub use ridge::fit_ridge;

use crate::dataset::Dataset;
use crate::error::Result;
use crate::Scalar;

/// MSE, R², entanglement and complexity of `fm` on `ds`.
pub fn score<T: Scalar>(fm: &FittedModel<T>, ds: &Dataset<T>) -> Result<Scores> {
    let yhat = fm.predict(ds)?;
    let phi = fm.individual.feature_matrix(ds)?;
    Ok(Scores {
        mse: mse(&yhat, ds.y())?.as_f64(),
        r2: r2(&yhat, ds.y())?.as_f64(),
        entanglement: entanglement(&phi).value.as_f64(),
        complexity: fm.individual.complexity,
    })
}
