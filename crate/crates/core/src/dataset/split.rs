use rand::seq::SliceRandom;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng;
use crate::Scalar;

/// Partitioning parameters shared by hold-out splits and k-fold CV.
///
/// Row order is always shuffled first: a Fisher-Yates shuffle
/// (`rand::seq::SliceRandom::shuffle`, rand 0.8) driven by ChaCha8 seeded via
/// `seed_from_u64(seed)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub folds: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.25,
            folds: 5,
            seed: 0,
        }
    }
}

impl SplitSpec {
    fn test_rows(&self, n: usize) -> Result<usize> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidSplit(format!(
                "test_fraction {} not in (0, 1)",
                self.test_fraction
            )));
        }
        let k = (self.test_fraction * n as f64).round() as usize;
        if k < 1 || k >= n {
            return Err(Error::InvalidSplit(format!(
                "test_fraction {} leaves {k} of {n} rows for testing",
                self.test_fraction
            )));
        }
        Ok(k)
    }
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::seeded(seed));
    idx
}

/// Returns `(train, test)` with `round(test_fraction · N)` test rows. Both
/// parts keep the original relative row order.
pub fn train_test_split<T: Scalar>(
    ds: &Dataset<T>,
    spec: &SplitSpec,
) -> Result<(Dataset<T>, Dataset<T>)> {
    let n = ds.n_rows();
    let k = spec.test_rows(n)?;
    let perm = permutation(n, spec.seed);
    let mut test = perm[..k].to_vec();
    let mut train = perm[k..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((ds.subset(&train), ds.subset(&test)))
}

/// Row indices of each validation fold. The first `N mod folds` folds hold one
/// extra row.
pub fn fold_indices(n: usize, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::InvalidSplit(format!("folds = {folds}, need at least 2")));
    }
    if folds > n {
        return Err(Error::InvalidSplit(format!("folds = {folds} exceeds {n} rows")));
    }
    let perm = permutation(n, seed);
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        let mut fold = perm[start..start + len].to_vec();
        fold.sort_unstable();
        out.push(fold);
        start += len;
    }
    Ok(out)
}

/// `(train, validation)` pairs, one per fold.
pub fn kfold<T: Scalar>(ds: &Dataset<T>, spec: &SplitSpec) -> Result<Vec<(Dataset<T>, Dataset<T>)>> {
    let n = ds.n_rows();
    let folds = fold_indices(n, spec.folds, spec.seed)?;
    Ok(folds
        .iter()
        .map(|val| {
            let mut in_val = vec![false; n];
            for &i in val {
                in_val[i] = true;
            }
            let train: Vec<usize> = (0..n).filter(|&i| !in_val[i]).collect();
            (ds.subset(&train), ds.subset(val))
        })
        .collect())
}
