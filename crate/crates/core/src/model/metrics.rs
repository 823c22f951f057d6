use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::normalize::is_constant;
use crate::scalar::mean;
use crate::Scalar;

fn check_lengths(n_hat: usize, n: usize) -> Result<()> {
    if n_hat != n {
        return Err(Error::DimensionMismatch { expected: n, got: n_hat });
    }
    if n < 1 {
        return Err(Error::Metric("no samples".into()));
    }
    Ok(())
}

pub fn mse<T: Scalar>(yhat: &[T], y: &[T]) -> Result<T> {
    check_lengths(yhat.len(), y.len())?;
    Ok(yhat.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>() / T::from_usize(y.len()).unwrap())
}

/// Coefficient of determination `1 − SS_res / SS_tot`.
pub fn r2<T: Scalar>(yhat: &[T], y: &[T]) -> Result<T> {
    check_lengths(yhat.len(), y.len())?;
    if y.len() < 2 {
        return Err(Error::Metric("r2 needs at least two samples".into()));
    }
    let y_bar = mean(y);
    let ss_tot: T = y.iter().map(|&v| (v - y_bar) * (v - y_bar)).sum();
    if !(ss_tot > T::zero()) {
        return Err(Error::Metric("r2 undefined for a constant target".into()));
    }
    let ss_res: T = yhat.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum();
    Ok(T::one() - ss_res / ss_tot)
}

/// Pearson correlation, `None` when either input is constant (same rule as
/// feature normalization).
pub fn pearson<T: Scalar>(a: &[T], b: &[T]) -> Option<T> {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = T::zero();
    let mut saa = T::zero();
    let mut sbb = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    let n = T::from_usize(a.len().max(1)).unwrap();
    if is_constant(a, (saa / n).sqrt()) || is_constant(b, (sbb / n).sqrt()) {
        return None;
    }
    let denom = (saa * sbb).sqrt();
    if denom > T::zero() && denom.is_finite() {
        Some((sab / denom).max(-T::one()).min(T::one()))
    } else {
        None
    }
}

/// Mean squared pairwise Pearson correlation of a representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entanglement<T> {
    pub value: T,
    /// Non-constant features that entered the average.
    pub features_used: usize,
    /// Fewer than two usable features; `value` is 0 by definition.
    pub degenerate: bool,
}

/// `1 / (m (m − 1)) Σ_{i ≠ j} r_ij²` over the non-constant columns of `phi`.
pub fn entanglement<T: Scalar>(phi: &Matrix<T>) -> Entanglement<T> {
    let usable: Vec<&[T]> = phi
        .columns()
        .filter(|c| {
            let mu = mean(c);
            let var = c.iter().map(|&v| (v - mu) * (v - mu)).sum::<T>()
                / T::from_usize(c.len().max(1)).unwrap();
            !is_constant(c, var.sqrt())
        })
        .collect();
    let m = usable.len();
    if m < 2 {
        return Entanglement {
            value: T::zero(),
            features_used: m,
            degenerate: true,
        };
    }
    let mut total = T::zero();
    for i in 0..m {
        for j in (i + 1)..m {
            let r = pearson(usable[i], usable[j]).unwrap_or_else(T::zero);
            total += r * r;
        }
    }
    // unordered pairs counted once, so m (m - 1) / 2 of them
    let pairs = T::from_usize(m * (m - 1) / 2).unwrap();
    Entanglement {
        value: (total / pairs).min(T::one()),
        features_used: m,
        degenerate: false,
    }
}

/// Scores of a model on one dataset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub mse: f64,
    pub r2: f64,
    pub entanglement: f64,
    pub complexity: usize,
}
