//! Crossovers that read program semantics (outputs on the training data).

use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::pearson;
use crate::model::FeatureStats;
use crate::program::Individual;
use crate::scalar::mean;
use crate::variation::feedback::FeedbackProbs;
use crate::Scalar;

/// Residual norm below which stagewise selection stops looking at correlations.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// Absolute correlations within this distance of the best count as tied.
pub const CORRELATION_TIE: f64 = 1e-12;

/// Position of the first candidate whose |correlation| is within
/// [`CORRELATION_TIE`] of the largest; `None` entries are skipped.
fn first_best<T: Scalar>(scores: &[Option<T>]) -> Option<usize> {
    let top = scores.iter().flatten().map(|c| c.as_f64()).fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .position(|c| c.is_some_and(|c| c.as_f64() >= top - CORRELATION_TIE))
}

/// Decision taken by [`res_xo`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResXoChoice {
    /// Feature of the first parent that is dropped.
    pub replaced: usize,
    /// Feature of the second parent that takes its place; `None` when every
    /// candidate is constant (or the residual is), leaving the child a copy.
    pub donor: Option<usize>,
}

/// Residual of `p1`'s model with feature `drop` removed:
/// `y − intercept − Σ_{i ≠ drop} β_i z_i`.
pub fn residual_without<T: Scalar>(p1: &Individual<T>, ds: &Dataset<T>, drop: usize) -> Result<Vec<T>> {
    if !p1.is_fitted() {
        return Err(Error::Unfitted);
    }
    let z = p1.normalized_features(ds)?;
    let mut r: Vec<T> = ds.y().iter().map(|&y| y - p1.intercept).collect();
    for (i, &b) in p1.coefficients.iter().enumerate() {
        if i == drop || b == T::zero() {
            continue;
        }
        for (rv, &zv) in r.iter_mut().zip(z.col(i)) {
            *rv -= b * zv;
        }
    }
    Ok(r)
}

/// Picks the feature to drop and the replacement without building the child.
pub fn res_xo_choice<T: Scalar, R: Rng + ?Sized>(
    p1: &Individual<T>,
    p2: &Individual<T>,
    ds: &Dataset<T>,
    probs1: &FeedbackProbs,
    rng: &mut R,
) -> Result<ResXoChoice> {
    let replaced = probs1.sample(rng);
    let r = residual_without(p1, ds, replaced)?;
    let scores = p2
        .programs
        .iter()
        .map(|program| Ok(pearson(&program.evaluate(ds)?, &r).map(T::abs)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResXoChoice {
        replaced,
        donor: first_best(&scores),
    })
}

/// Residual-fit crossover: replaces a feature of `p1` (drawn from `probs1`)
/// with the feature of `p2` most correlated, in absolute value, with `p1`'s
/// residual once that feature is removed. Near-ties (see [`CORRELATION_TIE`])
/// go to the lowest index.
pub fn res_xo<T: Scalar, R: Rng + ?Sized>(
    p1: &Individual<T>,
    p2: &Individual<T>,
    ds: &Dataset<T>,
    probs1: &FeedbackProbs,
    rng: &mut R,
) -> Result<Individual<T>> {
    let choice = res_xo_choice(p1, p2, ds, probs1, rng)?;
    let mut programs = p1.programs.clone();
    if let Some(j) = choice.donor {
        programs[choice.replaced] = p2.programs[j].clone();
    }
    Ok(Individual::new(programs))
}

/// Which parent a pooled feature came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parent {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoolRef {
    pub parent: Parent,
    pub index: usize,
}

struct PoolEntry<T> {
    at: PoolRef,
    centered: Vec<T>,
}

/// Feature sequence chosen by forward stagewise selection over the pooled
/// features of both parents, `|p1|` entries long.
///
/// Starting from `r = y − ȳ`, each round takes the pooled (centered) feature
/// with the largest `|corr(φ, r)|`, fits its least-squares coefficient
/// `b = ⟨φ, r⟩ / ⟨φ, φ⟩`, and updates `r ← r − b φ`. Near-ties go to the earlier
/// pool entry (first parent before second, then by index). Constant features
/// never enter the pool; pool members with outputs identical to a selected
/// feature are dropped with it. If the residual vanishes the remaining slots
/// take pool members in order; if the pool runs dry they take the first
/// parent's unselected features in order.
pub fn stage_xo_selection<T: Scalar>(p1: &Individual<T>, p2: &Individual<T>, ds: &Dataset<T>) -> Result<Vec<PoolRef>> {
    let target = p1.dimensionality();
    let mut pool: Vec<PoolEntry<T>> = Vec::new();
    for (parent, ind) in [(Parent::First, p1), (Parent::Second, p2)] {
        for (index, program) in ind.programs.iter().enumerate() {
            let out = program.evaluate(ds)?;
            if FeatureStats::of(&out).constant {
                continue;
            }
            let mu = mean(&out);
            pool.push(PoolEntry {
                at: PoolRef { parent, index },
                centered: out.into_iter().map(|v| v - mu).collect(),
            });
        }
    }

    let y_bar = mean(ds.y());
    let mut r: Vec<T> = ds.y().iter().map(|&v| v - y_bar).collect();
    let mut selected: Vec<PoolRef> = Vec::with_capacity(target);

    while selected.len() < target && !pool.is_empty() {
        let norm = r.iter().map(|&v| v * v).sum::<T>().sqrt();
        if norm.as_f64() < RESIDUAL_FLOOR {
            let missing = target - selected.len();
            selected.extend(pool.iter().take(missing).map(|e| e.at));
            break;
        }
        let scores: Vec<Option<T>> = pool.iter().map(|e| pearson(&e.centered, &r).map(T::abs)).collect();
        let Some(k) = first_best(&scores) else {
            let missing = target - selected.len();
            selected.extend(pool.iter().take(missing).map(|e| e.at));
            break;
        };
        let chosen = pool.remove(k);
        let num: T = chosen.centered.iter().zip(&r).map(|(&a, &b)| a * b).sum();
        let den: T = chosen.centered.iter().map(|&a| a * a).sum();
        let b = num / den;
        for (rv, &p) in r.iter_mut().zip(&chosen.centered) {
            *rv -= b * p;
        }
        pool.retain(|e| e.centered != chosen.centered);
        selected.push(chosen.at);
    }

    if selected.len() < target {
        let used: Vec<usize> = selected
            .iter()
            .filter(|s| s.parent == Parent::First)
            .map(|s| s.index)
            .collect();
        let fill = (0..target)
            .filter(|i| !used.contains(i))
            .map(|index| PoolRef { parent: Parent::First, index });
        let missing = target - selected.len();
        selected.extend(fill.take(missing));
    }
    Ok(selected)
}

/// Stagewise crossover: child built from [`stage_xo_selection`].
pub fn stage_xo<T: Scalar>(p1: &Individual<T>, p2: &Individual<T>, ds: &Dataset<T>) -> Result<Individual<T>> {
    let picks = stage_xo_selection(p1, p2, ds)?;
    let programs = picks
        .into_iter()
        .map(|s| match s.parent {
            Parent::First => p1.programs[s.index].clone(),
            Parent::Second => p2.programs[s.index].clone(),
        })
        .collect();
    Ok(Individual::new(programs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fit_individual, FitSettings};
    use crate::program::{Operator, Program};
    use crate::rng;

    fn data() -> Dataset<f64> {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.31).sin(), (t * 0.17).cos(), (t * 0.05) - 1.0]
            })
            .collect();
        let y = rows.iter().map(|r| 3.0 * r[0]).collect();
        Dataset::from_rows(&rows, y).unwrap()
    }

    fn fitted(ds: &Dataset<f64>, programs: Vec<Program<f64>>) -> Individual<f64> {
        let settings = FitSettings { gd_iters: 0, ..FitSettings::default() };
        fit_individual(&Individual::new(programs), ds, &settings).unwrap().individual
    }

    #[test]
    fn stage_xo_first_pick_is_perfect_feature() {
        let ds = data();
        let p1 = fitted(&ds, vec![Program::var(1)]);
        let p2 = fitted(&ds, vec![Program::var(0)]);
        let child = stage_xo(&p1, &p2, &ds).unwrap();
        assert_eq!(child.programs, vec![Program::var(0)]);
    }

    #[test]
    fn stage_xo_self_cross_is_subset() {
        let ds = data();
        let programs = vec![
            Program::var(1),
            Program::unary(Operator::Square, Program::var(2)),
            Program::var(0),
        ];
        let p = fitted(&ds, programs.clone());
        let sel = stage_xo_selection(&p, &p, &ds).unwrap();
        assert_eq!(sel.len(), 3);
        assert!(sel.iter().all(|s| s.parent == Parent::First));
        let mut idx: Vec<usize> = sel.iter().map(|s| s.index).collect();
        idx.sort_unstable();
        assert_eq!(idx, vec![0, 1, 2]);
    }

    #[test]
    fn stage_xo_fills_from_first_parent_when_pool_empties() {
        let ds = data();
        let p1 = fitted(&ds, vec![Program::constant(1.0), Program::var(0)]);
        let p2 = fitted(&ds, vec![Program::constant(2.0)]);
        let sel = stage_xo_selection(&p1, &p2, &ds).unwrap();
        assert_eq!(
            sel,
            vec![
                PoolRef { parent: Parent::First, index: 1 },
                PoolRef { parent: Parent::First, index: 0 },
            ]
        );
    }

    #[test]
    fn res_xo_picks_exact_residual_match() {
        let ds = data();
        // y = 3 x1; dropping the only feature leaves r = y - ybar, matched by x1
        let p1 = fitted(&ds, vec![Program::var(1)]);
        let p2 = fitted(&ds, vec![Program::var(2), Program::var(0), Program::var(1)]);
        let mut r = rng::seeded(0);
        let choice = res_xo_choice(&p1, &p2, &ds, &FeedbackProbs::uniform(1), &mut r).unwrap();
        assert_eq!(choice, ResXoChoice { replaced: 0, donor: Some(1) });
        let child = res_xo(&p1, &p2, &ds, &FeedbackProbs::uniform(1), &mut rng::seeded(0)).unwrap();
        assert_eq!(child.programs, vec![Program::var(0)]);
    }

    #[test]
    fn res_xo_constant_donors_copy_parent() {
        let ds = data();
        let p1 = fitted(&ds, vec![Program::var(1), Program::var(2)]);
        let p2 = fitted(&ds, vec![Program::constant(0.3)]);
        let child = res_xo(&p1, &p2, &ds, &FeedbackProbs::uniform(2), &mut rng::seeded(4)).unwrap();
        assert_eq!(child.programs, p1.programs);
    }

    #[test]
    fn res_xo_requires_fitted_parent() {
        let ds = data();
        let p1 = Individual::new(vec![Program::var(1)]);
        let p2 = fitted(&ds, vec![Program::var(0)]);
        assert!(matches!(
            res_xo(&p1, &p2, &ds, &FeedbackProbs::uniform(1), &mut rng::seeded(0)),
            Err(Error::Unfitted)
        ));
    }
}
