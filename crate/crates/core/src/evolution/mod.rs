//! The generational loop: initialization, parent selection, offspring
//! production, survival and run history.

mod history;
mod lexicase;
mod nsga2;

pub use history::{GenerationRecord, RunHistory, HISTORY_HEADER};
pub use lexicase::{case_epsilons, eps_lexicase_select};
pub use nsga2::{crowding_distance, dominates, fast_non_dominated_sort, nsga2_select};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::{fit_with_predictions, linear_prediction, mse, FitSettings, FittedModel};
use crate::program::{random_program, Individual};
use crate::rng::{stream, EngineRng};
use crate::scalar::median;
use crate::variation::{
    feature_crossover, feedback_probs, mutate, res_xo, stage_xo, subtree_crossover, CrossoverKind, FeedbackProbs,
    VariationConfig,
};
use crate::Scalar;

/// Attempts at drawing an initial individual whose linear model can be fitted.
pub const INIT_RETRIES: usize = 100;

/// Run settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    pub variation: VariationConfig,
    pub lambda: f64,
    pub gd_iters: usize,
    pub lr: f64,
    pub seed: u64,
}

impl EvolutionConfig {
    /// Tuned variation settings for `xo_type`, population 100, 50 generations.
    pub fn tuned(xo_type: CrossoverKind, n_attributes: usize, seed: u64) -> Self {
        Self {
            population_size: 100,
            generations: 50,
            variation: VariationConfig::tuned(xo_type, n_attributes),
            lambda: 1e-3,
            gd_iters: 10,
            lr: 0.1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be at least 2".into()));
        }
        if self.generations < 1 {
            return Err(Error::Config("generations must be at least 1".into()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Config(format!("lambda = {} must be finite and non-negative", self.lambda)));
        }
        if !(self.lr >= 0.0) || !self.lr.is_finite() {
            return Err(Error::Config(format!("lr = {} must be finite and non-negative", self.lr)));
        }
        self.variation.validate()
    }

    pub fn fit_settings<T: Scalar>(&self) -> FitSettings<T> {
        FitSettings {
            lambda: T::lit(self.lambda),
            gd_iters: self.gd_iters,
            learning_rate: T::lit(self.lr),
        }
    }
}

/// Fitted members with their per-case squared training errors.
#[derive(Clone, Debug, PartialEq)]
pub struct Population<T> {
    pub members: Vec<Individual<T>>,
    /// `case_errors[member][case]`.
    pub case_errors: Vec<Vec<T>>,
    pub validation_mse: Vec<T>,
}

struct Evaluated<T> {
    individual: Individual<T>,
    case_errors: Vec<T>,
    validation_mse: T,
}

impl<T: Scalar> Population<T> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn from_evaluated(items: Vec<Evaluated<T>>) -> Self {
        let mut pop = Population {
            members: Vec::with_capacity(items.len()),
            case_errors: Vec::with_capacity(items.len()),
            validation_mse: Vec::with_capacity(items.len()),
        };
        for e in items {
            pop.members.push(e.individual);
            pop.case_errors.push(e.case_errors);
            pop.validation_mse.push(e.validation_mse);
        }
        pop
    }

    /// ε-lexicase choice over the members' case errors.
    pub fn select<R: Rng + ?Sized>(&self, eps: &[T], rng: &mut R) -> usize {
        eps_lexicase_select(&self.case_errors, eps, rng)
    }

    /// Keeps `target` members by non-dominated sorting on
    /// (training MSE, complexity) with crowding-distance truncation.
    pub fn survive(self, target: usize) -> Self {
        let objs: Vec<[f64; 2]> = self
            .members
            .iter()
            .map(|m| {
                let f = m.fitness_mse.as_f64();
                [if f.is_nan() { f64::INFINITY } else { f }, m.complexity as f64]
            })
            .collect();
        let keep = nsga2_select(&objs, target);
        let mut slots: Vec<Option<(Individual<T>, Vec<T>, T)>> = self
            .members
            .into_iter()
            .zip(self.case_errors)
            .zip(self.validation_mse)
            .map(|((m, e), v)| Some((m, e, v)))
            .collect();
        let mut out = Population {
            members: Vec::with_capacity(target),
            case_errors: Vec::with_capacity(target),
            validation_mse: Vec::with_capacity(target),
        };
        for i in keep {
            let (m, e, v) = slots[i].take().expect("survivor selected twice");
            out.members.push(m);
            out.case_errors.push(e);
            out.validation_mse.push(v);
        }
        out
    }
}

fn evaluate<T: Scalar>(
    ind: &Individual<T>,
    train: &Dataset<T>,
    val: &Dataset<T>,
    settings: &FitSettings<T>,
) -> Result<Evaluated<T>> {
    let (fm, preds) = fit_with_predictions(ind, train, settings)?;
    let case_errors = preds.iter().zip(train.y()).map(|(&p, &y)| (p - y) * (p - y)).collect();
    let individual = fm.individual;
    let phi = individual.feature_matrix(val)?;
    let yhat = linear_prediction(&phi, &individual.feature_stats, &individual.coefficients, individual.intercept);
    let validation_mse = mse(&yhat, val.y())?;
    Ok(Evaluated {
        individual,
        case_errors,
        validation_mse,
    })
}

fn random_individual<T: Scalar>(cfg: &EvolutionConfig, d: usize, rng: &mut EngineRng) -> Individual<T> {
    let m = rng.gen_range(1..=cfg.variation.max_dimensionality);
    let programs = (0..m).map(|_| random_program(cfg.variation.max_depth, d, rng)).collect();
    Individual::new(programs)
}

fn init_slot<T: Scalar>(
    cfg: &EvolutionConfig,
    train: &Dataset<T>,
    val: &Dataset<T>,
    slot: usize,
) -> Result<Evaluated<T>> {
    let mut rng = stream(cfg.seed, 0, slot as u64);
    let settings = cfg.fit_settings();
    let mut last = None;
    for _ in 0..INIT_RETRIES {
        let ind = random_individual(cfg, train.n_attributes(), &mut rng);
        match evaluate(&ind, train, val, &settings) {
            Ok(e) => return Ok(e),
            Err(Error::SingularSystem) => last = Some(Error::SingularSystem),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::SingularSystem))
}

/// `population_size` random individuals, each with dimensionality uniform in
/// `[1, max_dimensionality]`, fitted on `train`. Slot `i` draws from its own
/// stream of the run seed.
pub fn init_population<T: Scalar>(cfg: &EvolutionConfig, train: &Dataset<T>, val: &Dataset<T>) -> Result<Population<T>> {
    cfg.validate()?;
    check_shapes(train, val)?;
    let items = (0..cfg.population_size)
        .into_par_iter()
        .map(|slot| init_slot(cfg, train, val, slot))
        .collect::<Result<Vec<_>>>()?;
    Ok(Population::from_evaluated(items))
}

fn check_shapes<T: Scalar>(train: &Dataset<T>, val: &Dataset<T>) -> Result<()> {
    if train.n_attributes() != val.n_attributes() {
        return Err(Error::DimensionMismatch {
            expected: train.n_attributes(),
            got: val.n_attributes(),
        });
    }
    Ok(())
}

/// How an offspring was made.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    FeatureCrossover,
    SubtreeCrossover,
    Mutation,
}

/// Produces one unfitted child of the population.
pub fn make_offspring<T: Scalar, R: Rng + ?Sized>(
    pop: &Population<T>,
    probs: &[FeedbackProbs],
    eps: &[T],
    cfg: &VariationConfig,
    train: &Dataset<T>,
    rng: &mut R,
) -> Result<(Individual<T>, Origin)> {
    let a = pop.select(eps, rng);
    let p1 = &pop.members[a];
    assert!(p1.is_fitted(), "unfitted member entered variation");
    if rng.gen_bool(cfg.p_crossover) {
        let b = pop.select(eps, rng);
        let p2 = &pop.members[b];
        if rng.gen_bool(cfg.p_feature_xo) {
            let child = match cfg.xo_type {
                CrossoverKind::Standard => feature_crossover(p1, p2, &probs[a], &probs[b], rng),
                CrossoverKind::ResXo => res_xo(p1, p2, train, &probs[a], rng)?,
                CrossoverKind::StageXo => stage_xo(p1, p2, train)?,
            };
            Ok((child, Origin::FeatureCrossover))
        } else {
            Ok((subtree_crossover(p1, p2, &probs[a], cfg.max_depth, rng), Origin::SubtreeCrossover))
        }
    } else {
        Ok((mutate(p1, &probs[a], cfg, train.n_attributes(), rng), Origin::Mutation))
    }
}

fn offspring_slot<T: Scalar>(
    cfg: &EvolutionConfig,
    pop: &Population<T>,
    probs: &[FeedbackProbs],
    eps: &[T],
    train: &Dataset<T>,
    val: &Dataset<T>,
    generation: usize,
    slot: usize,
) -> Result<(Evaluated<T>, Origin)> {
    let mut rng = stream(cfg.seed, generation as u64, slot as u64);
    let (child, origin) = make_offspring(pop, probs, eps, &cfg.variation, train, &mut rng)?;
    match evaluate(&child, train, val, &cfg.fit_settings()) {
        Ok(e) => Ok((e, origin)),
        // an unfittable child (only possible without a ridge penalty) is dropped in favour of a random member
        Err(Error::SingularSystem) => {
            let i = rng.gen_range(0..pop.len());
            let e = Evaluated {
                individual: pop.members[i].clone(),
                case_errors: pop.case_errors[i].clone(),
                validation_mse: pop.validation_mse[i],
            };
            Ok((e, Origin::Mutation))
        }
        Err(e) => Err(e),
    }
}

fn median_f64(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    median(&v)
}

/// Index of the lowest validation MSE, ties to lower complexity, then lower index.
fn best_by_validation<T: Scalar>(pop: &Population<T>) -> usize {
    (0..pop.len())
        .min_by(|&i, &j| {
            let (vi, vj) = (pop.validation_mse[i].as_f64(), pop.validation_mse[j].as_f64());
            vi.total_cmp(&vj)
                .then(pop.members[i].complexity.cmp(&pop.members[j].complexity))
                .then(i.cmp(&j))
        })
        .expect("empty population")
}

/// Runs the generational loop and returns the member with the best validation
/// MSE seen over the run (ties to lower complexity) with the history.
pub fn evolve<T: Scalar>(
    cfg: &EvolutionConfig,
    train: &Dataset<T>,
    val: &Dataset<T>,
) -> Result<(FittedModel<T>, RunHistory)> {
    let mut pop = init_population(cfg, train, val)?;
    let mut history = RunHistory::default();

    let first = best_by_validation(&pop);
    let mut best = (pop.validation_mse[first], pop.members[first].clone());

    for generation in 1..=cfg.generations {
        let eps = case_epsilons(&pop.case_errors);
        let probs: Vec<FeedbackProbs> = pop
            .members
            .iter()
            .map(|m| feedback_probs(&m.coefficients, cfg.variation.feedback_gamma, cfg.variation.softmax_norm))
            .collect();
        let offspring = (0..cfg.population_size)
            .into_par_iter()
            .map(|slot| offspring_slot(cfg, &pop, &probs, &eps, train, val, generation, slot))
            .collect::<Result<Vec<_>>>()?;

        let mut child_ent = Vec::new();
        let mut feature_xo_children = 0;
        let mut combined = pop;
        for (e, origin) in offspring {
            if origin == Origin::FeatureCrossover {
                feature_xo_children += 1;
                if e.individual.dimensionality() >= 2 {
                    child_ent.push(e.individual.entanglement.as_f64());
                }
            }
            combined.members.push(e.individual);
            combined.case_errors.push(e.case_errors);
            combined.validation_mse.push(e.validation_mse);
        }
        pop = combined.survive(cfg.population_size);

        let i = best_by_validation(&pop);
        let (v, c) = (pop.validation_mse[i], pop.members[i].complexity);
        if v < best.0 || (v == best.0 && c < best.1.complexity) {
            best = (v, pop.members[i].clone());
        }

        let record = GenerationRecord {
            generation,
            best_train_mse: pop
                .members
                .iter()
                .map(|m| m.fitness_mse.as_f64())
                .fold(f64::INFINITY, f64::min),
            median_train_mse: median_f64(pop.members.iter().map(|m| m.fitness_mse.as_f64())),
            median_complexity: median_f64(pop.members.iter().map(|m| m.complexity as f64)),
            median_entanglement: median_f64(pop.members.iter().map(|m| m.entanglement.as_f64())),
            best_validation_mse: best.0.as_f64(),
            feature_xo_children,
            median_child_entanglement: median(&child_ent),
        };
        log::debug!(
            "generation {generation}: best train mse {:.6e}, best validation mse {:.6e}, median complexity {}",
            record.best_train_mse,
            record.best_validation_mse,
            record.median_complexity
        );
        history.child_entanglement.extend(child_ent);
        history.records.push(record);
    }

    let (val_mse, individual) = best;
    history.final_validation_mse = val_mse.as_f64();
    history.final_complexity = individual.complexity;
    log::info!(
        "finished {} generations: validation mse {:.6e}, complexity {}",
        cfg.generations,
        history.final_validation_mse,
        history.final_complexity
    );
    let model = FittedModel {
        individual,
        lambda: T::lit(cfg.lambda),
        attribute_names: train.attribute_names().to_vec(),
        target_name: train.target_name().to_owned(),
    };
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synth_problem;

    fn data(seed: u64) -> (Dataset<f64>, Dataset<f64>) {
        (
            synth_problem("sum-sq", 120, seed).unwrap(),
            synth_problem("sum-sq", 60, seed + 1).unwrap(),
        )
    }

    fn small_cfg(seed: u64) -> EvolutionConfig {
        let mut cfg = EvolutionConfig::tuned(CrossoverKind::StageXo, 2, seed);
        cfg.population_size = 10;
        cfg.generations = 3;
        cfg
    }

    #[test]
    fn init_population_fitted_within_caps() {
        let (tr, va) = data(0);
        let cfg = small_cfg(3);
        let pop = init_population(&cfg, &tr, &va).unwrap();
        assert_eq!(pop.len(), 10);
        for (m, e) in pop.members.iter().zip(&pop.case_errors) {
            assert!(m.is_fitted());
            assert!(m.dimensionality() >= 1 && m.dimensionality() <= cfg.variation.max_dimensionality);
            assert!(m.max_depth() <= cfg.variation.max_depth);
            assert_eq!(e.len(), tr.n_rows());
        }
        assert_eq!(pop, init_population(&cfg, &tr, &va).unwrap());
    }

    #[test]
    fn smoke_two_members_one_generation() {
        let (tr, va) = data(1);
        let mut cfg = small_cfg(5);
        cfg.population_size = 2;
        cfg.generations = 1;
        let (fm, h) = evolve(&cfg, &tr, &va).unwrap();
        assert!(fm.individual.is_fitted());
        assert_eq!(h.records.len(), 1);
    }

    #[test]
    fn validation_trace_non_increasing_and_deterministic() {
        let (tr, va) = data(2);
        let mut cfg = small_cfg(9);
        cfg.generations = 6;
        for kind in CrossoverKind::ALL {
            cfg.variation.xo_type = kind;
            let (fm, h) = evolve(&cfg, &tr, &va).unwrap();
            let trace = h.best_validation_trace();
            assert_eq!(trace.len(), 6);
            assert!(trace.windows(2).all(|w| w[1] <= w[0]), "{trace:?}");
            assert_eq!(h.final_validation_mse, *trace.last().unwrap());
            let (fm2, h2) = evolve(&cfg, &tr, &va).unwrap();
            assert_eq!(fm, fm2);
            assert_eq!(h.records.len(), h2.records.len());
            assert_eq!(format!("{h:?}"), format!("{h2:?}"));
        }
    }

    #[test]
    fn survival_keeps_population_size() {
        let (tr, va) = data(3);
        let cfg = small_cfg(11);
        let a = init_population(&cfg, &tr, &va).unwrap();
        let mut b = a.clone();
        b.members.extend(a.members.iter().cloned());
        b.case_errors.extend(a.case_errors.iter().cloned());
        b.validation_mse.extend(a.validation_mse.iter().copied());
        assert_eq!(b.survive(10).len(), 10);
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg(0);
        assert!(cfg.validate().is_ok());
        cfg.population_size = 1;
        assert!(cfg.validate().is_err());
        cfg.population_size = 2;
        cfg.generations = 0;
        assert!(cfg.validate().is_err());
    }
}
