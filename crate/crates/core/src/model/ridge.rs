use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::mean;
use crate::Scalar;

/// Solves `(ZᵀZ + λI) β = Zᵀ(y − ȳ)` by Cholesky factorization and returns
/// `(β, ȳ)`. `z` must be column-centered, which makes `ȳ` the intercept.
///
/// With `lambda == 0` a rank-deficient `z` is reported as
/// [`Error::SingularSystem`].
pub fn fit_ridge<T: Scalar>(z: &Matrix<T>, y: &[T], lambda: T) -> Result<(Vec<T>, T)> {
    if z.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: z.rows(),
            got: y.len(),
        });
    }
    if !(lambda >= T::zero()) {
        return Err(Error::Config(format!("ridge penalty must be >= 0, got {lambda}")));
    }
    let m = z.cols();
    let y_bar = mean(y);
    if m == 0 {
        return Ok((Vec::new(), y_bar));
    }

    let mut gram = vec![T::zero(); m * m];
    let mut rhs = vec![T::zero(); m];
    for i in 0..m {
        let zi = z.col(i);
        rhs[i] = zi.iter().zip(y).map(|(&a, &b)| a * (b - y_bar)).sum();
        for j in 0..=i {
            let g: T = zi.iter().zip(z.col(j)).map(|(&a, &b)| a * b).sum();
            gram[i * m + j] = g;
            gram[j * m + i] = g;
        }
        gram[i * m + i] += lambda;
    }

    let max_diag = (0..m).fold(T::zero(), |acc, i| acc.max(gram[i * m + i]));
    let tol = if lambda > T::zero() {
        T::zero()
    } else {
        max_diag * T::epsilon() * T::from_usize(m * 16).unwrap()
    };
    let l = cholesky(&gram, m, tol).ok_or(Error::SingularSystem)?;

    // forward then back substitution
    let mut w = vec![T::zero(); m];
    for i in 0..m {
        let s: T = (0..i).map(|k| l[i * m + k] * w[k]).sum();
        w[i] = (rhs[i] - s) / l[i * m + i];
    }
    let mut beta = vec![T::zero(); m];
    for i in (0..m).rev() {
        let s: T = (i + 1..m).map(|k| l[k * m + i] * beta[k]).sum();
        beta[i] = (w[i] - s) / l[i * m + i];
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok((beta, y_bar))
}

/// Lower-triangular factor of a symmetric positive definite row-major matrix,
/// or `None` when a pivot falls to `tol` or below.
fn cholesky<T: Scalar>(a: &[T], m: usize, tol: T) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); m * m];
    for i in 0..m {
        for j in 0..=i {
            let s: T = (0..j).map(|k| l[i * m + k] * l[j * m + k]).sum();
            if i == j {
                let pivot = a[i * m + i] - s;
                if !(pivot > tol) {
                    return None;
                }
                l[i * m + i] = pivot.sqrt();
            } else {
                l[i * m + j] = (a[i * m + j] - s) / l[j * m + j];
            }
        }
    }
    Some(l)
}
