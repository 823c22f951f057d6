use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::mean;
use crate::Scalar;

/// Training-time location and scale of one feature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats<T> {
    pub mean: T,
    /// Population standard deviation; 1 for constant features.
    pub std: T,
    pub constant: bool,
}

impl<T: Scalar> FeatureStats<T> {
    /// Mean and population standard deviation of `column`.
    pub fn of(column: &[T]) -> Self {
        let mu = mean(column);
        let var = column.iter().map(|&v| (v - mu) * (v - mu)).sum::<T>()
            / T::from_usize(column.len().max(1)).unwrap();
        let std = var.sqrt();
        if is_constant(column, std) {
            Self {
                mean: mu,
                std: T::one(),
                constant: true,
            }
        } else {
            Self {
                mean: mu,
                std,
                constant: false,
            }
        }
    }

    #[inline]
    pub fn apply(&self, v: T) -> T {
        if self.constant {
            T::zero()
        } else {
            (v - self.mean) / self.std
        }
    }
}

/// A column counts as constant when its spread is negligible against its
/// magnitude (relative threshold `sqrt(epsilon)`).
pub(crate) fn is_constant<T: Scalar>(column: &[T], std: T) -> bool {
    let scale = column.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    !(std > T::epsilon().sqrt() * scale) || !std.is_finite()
}

/// Standardizes each column to zero mean and unit population variance.
/// Constant columns become all zeros and are flagged in their stats.
pub fn normalize_features<T: Scalar>(phi: &Matrix<T>) -> (Matrix<T>, Vec<FeatureStats<T>>) {
    let mut z = phi.clone();
    let mut stats = Vec::with_capacity(phi.cols());
    for j in 0..phi.cols() {
        let s = FeatureStats::of(phi.col(j));
        for v in z.col_mut(j) {
            *v = s.apply(*v);
        }
        stats.push(s);
    }
    (z, stats)
}
