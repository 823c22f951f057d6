use rand::Rng;

use crate::scalar::median;
use crate::Scalar;

/// Per-case ε: the median absolute deviation of the population's errors on
/// that case. `errors[member][case]`.
pub fn case_epsilons<T: Scalar>(errors: &[Vec<T>]) -> Vec<T> {
    let n_cases = errors.first().map_or(0, Vec::len);
    let mut column = Vec::with_capacity(errors.len());
    (0..n_cases)
        .map(|c| {
            column.clear();
            column.extend(errors.iter().map(|e| e[c]));
            let med = median(&column);
            let dev: Vec<T> = column.iter().map(|&e| (e - med).abs()).collect();
            median(&dev)
        })
        .collect()
}

/// ε-lexicase selection (semi-dynamic).
///
/// Cases are visited in a uniformly random order. At each case the surviving
/// candidates are filtered to those whose error is within `eps[case]` of the
/// best error among the current candidates. Stops when one candidate remains
/// or cases run out, then picks uniformly among the survivors.
pub fn eps_lexicase_select<T: Scalar, R: Rng + ?Sized>(errors: &[Vec<T>], eps: &[T], rng: &mut R) -> usize {
    assert!(!errors.is_empty(), "selection from an empty population");
    let n_cases = eps.len();
    let mut candidates: Vec<usize> = (0..errors.len()).collect();
    let mut order: Vec<usize> = (0..n_cases).collect();
    for i in 0..n_cases {
        if candidates.len() == 1 {
            break;
        }
        // incremental Fisher-Yates: the i-th case of a uniform random order
        let j = rng.gen_range(i..n_cases);
        order.swap(i, j);
        let case = order[i];
        let best = candidates
            .iter()
            .map(|&m| errors[m][case])
            .fold(T::infinity(), |a, b| if b < a { b } else { a });
        let bound = best + eps[case];
        candidates.retain(|&m| errors[m][case] <= bound);
    }
    candidates[rng.gen_range(0..candidates.len())]
}
