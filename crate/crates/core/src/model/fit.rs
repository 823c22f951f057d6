use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::metrics::{entanglement, mse};
use crate::model::normalize::{normalize_features, FeatureStats};
use crate::model::ridge::fit_ridge;
use crate::program::{Individual, Program};
use crate::Scalar;

/// Ridge penalty and weight-refinement settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitSettings<T> {
    pub lambda: T,
    pub gd_iters: usize,
    pub learning_rate: T,
}

impl<T: Scalar> Default for FitSettings<T> {
    fn default() -> Self {
        Self {
            lambda: T::lit(1e-3),
            gd_iters: 10,
            learning_rate: T::lit(0.1),
        }
    }
}

/// An individual with its linear model fitted on a training set.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedModel<T> {
    pub individual: Individual<T>,
    pub lambda: T,
    pub attribute_names: Vec<String>,
    pub target_name: String,
}

/// `intercept + Σ β_i · (φ_i − mean_i) / std_i`, summed in feature order.
pub(crate) fn linear_prediction<T: Scalar>(
    phi: &Matrix<T>,
    stats: &[FeatureStats<T>],
    beta: &[T],
    intercept: T,
) -> Vec<T> {
    let mut out = vec![intercept; phi.rows()];
    for (j, (s, &b)) in stats.iter().zip(beta).enumerate() {
        if b == T::zero() {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(phi.col(j)) {
            *o += b * s.apply(v);
        }
    }
    out
}

struct LinearFit<T> {
    stats: Vec<FeatureStats<T>>,
    beta: Vec<T>,
    intercept: T,
    predictions: Vec<T>,
    mse: T,
    phi: Matrix<T>,
}

fn linear_fit<T: Scalar>(programs: &[Program<T>], ds: &Dataset<T>, lambda: T) -> Result<LinearFit<T>> {
    let cols = programs
        .iter()
        .map(|p| p.evaluate(ds))
        .collect::<Result<Vec<_>>>()?;
    let phi = Matrix::from_columns(ds.n_rows(), cols);
    let (z, stats) = normalize_features(&phi);
    let active: Vec<usize> = (0..stats.len()).filter(|&j| !stats[j].constant).collect();
    let (beta_active, intercept) = fit_ridge(&z.select_cols(&active), ds.y(), lambda)?;
    let mut beta = vec![T::zero(); programs.len()];
    for (&j, b) in active.iter().zip(beta_active) {
        beta[j] = b;
    }
    let predictions = linear_prediction(&phi, &stats, &beta, intercept);
    let mse = mse(&predictions, ds.y())?;
    Ok(LinearFit {
        stats,
        beta,
        intercept,
        predictions,
        mse,
        phi,
    })
}

/// Gradient descent on the edge weights with normalization and coefficients
/// frozen. Stops at the first step that raises the training MSE (that step is
/// discarded). Returns `None` if no step was accepted.
fn refine_weights<T: Scalar>(
    programs: &[Program<T>],
    fit: &LinearFit<T>,
    ds: &Dataset<T>,
    settings: &FitSettings<T>,
) -> Result<Option<Vec<Program<T>>>> {
    let n = T::from_usize(ds.n_rows()).unwrap();
    let trainable: Vec<usize> = (0..programs.len())
        .filter(|&i| fit.beta[i] != T::zero() && programs[i].n_weights() > 0)
        .collect();
    if trainable.is_empty() {
        return Ok(None);
    }
    let mut current = programs.to_vec();
    let mut phi = fit.phi.clone();
    let mut preds = fit.predictions.clone();
    let mut current_mse = fit.mse;
    let mut accepted = false;

    for _ in 0..settings.gd_iters {
        let residual: Vec<T> = preds.iter().zip(ds.y()).map(|(&p, &y)| p - y).collect();
        let mut candidate = current.clone();
        let mut moved = false;
        for &i in &trainable {
            let jac = current[i].gradient(ds)?;
            let scale = T::lit(2.0) * fit.beta[i] / (fit.stats[i].std * n);
            let mut w = current[i].weights();
            for (k, wk) in w.iter_mut().enumerate() {
                let g = scale * jac.col(k).iter().zip(&residual).map(|(&d, &e)| d * e).sum::<T>();
                if !g.is_finite() {
                    return Ok(accepted.then_some(current));
                }
                if g != T::zero() {
                    moved = true;
                }
                *wk -= settings.learning_rate * g;
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Ok(accepted.then_some(current));
            }
            candidate[i].set_weights(&w);
        }
        if !moved {
            break;
        }
        let mut next_phi = phi.clone();
        for &i in &trainable {
            next_phi.col_mut(i).copy_from_slice(&candidate[i].evaluate(ds)?);
        }
        let next_preds = linear_prediction(&next_phi, &fit.stats, &fit.beta, fit.intercept);
        let next_mse = mse(&next_preds, ds.y())?;
        if !(next_mse <= current_mse) {
            break;
        }
        current = candidate;
        phi = next_phi;
        preds = next_preds;
        current_mse = next_mse;
        accepted = true;
    }
    Ok(accepted.then_some(current))
}

/// Fits the linear model of `ind` on `ds` and returns it with training
/// predictions.
///
/// Pipeline: evaluate, normalize, ridge; then up to `gd_iters` weight steps;
/// then evaluate, normalize and ridge again. The refined weights are kept
/// only if the final training MSE does not exceed the unrefined one.
pub fn fit_with_predictions<T: Scalar>(
    ind: &Individual<T>,
    ds: &Dataset<T>,
    settings: &FitSettings<T>,
) -> Result<(FittedModel<T>, Vec<T>)> {
    for p in &ind.programs {
        p.check_attributes(ds.n_attributes())?;
    }
    let base = linear_fit(&ind.programs, ds, settings.lambda)?;
    let mut programs = ind.programs.clone();
    let mut chosen = base;
    if settings.gd_iters > 0 {
        if let Some(refined) = refine_weights(&programs, &chosen, ds, settings)? {
            let refit = linear_fit(&refined, ds, settings.lambda)?;
            if refit.mse <= chosen.mse {
                programs = refined;
                chosen = refit;
            }
        }
    }
    let ent = entanglement(&chosen.phi);
    let mut individual = Individual::new(programs);
    individual.coefficients = chosen.beta;
    individual.intercept = chosen.intercept;
    individual.fitness_mse = chosen.mse;
    individual.feature_stats = chosen.stats;
    individual.entanglement = ent.value;
    Ok((
        FittedModel {
            individual,
            lambda: settings.lambda,
            attribute_names: ds.attribute_names().to_vec(),
            target_name: ds.target_name().to_owned(),
        },
        chosen.predictions,
    ))
}

pub fn fit_individual<T: Scalar>(
    ind: &Individual<T>,
    ds: &Dataset<T>,
    settings: &FitSettings<T>,
) -> Result<FittedModel<T>> {
    fit_with_predictions(ind, ds, settings).map(|(fm, _)| fm)
}

impl<T: Scalar> FittedModel<T> {
    pub fn n_attributes(&self) -> usize {
        self.attribute_names.len()
    }

    /// Predictions using the training-time feature statistics.
    pub fn predict(&self, ds: &Dataset<T>) -> Result<Vec<T>> {
        if ds.n_attributes() != self.n_attributes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_attributes(),
                got: ds.n_attributes(),
            });
        }
        let ind = &self.individual;
        if !ind.is_fitted() {
            return Err(Error::Unfitted);
        }
        let phi = ind.feature_matrix(ds)?;
        Ok(linear_prediction(&phi, &ind.feature_stats, &ind.coefficients, ind.intercept))
    }
}
