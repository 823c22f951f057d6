use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng;
use crate::Scalar;

/// One generator of the synthetic catalog.
///
/// Rows are drawn from ChaCha8 seeded with `seed_from_u64(seed)`: for each row
/// the `d` attributes are sampled uniformly from `range` in order, then (when
/// `noise_sigma > 0`) one standard normal deviate scaled by `noise_sigma` is
/// added to the target.
#[derive(Clone, Copy, Debug)]
pub struct SynthProblem {
    pub name: &'static str,
    pub d: usize,
    pub range: (f64, f64),
    pub noise_sigma: f64,
    pub formula: &'static str,
    pub target: fn(&[f64]) -> f64,
}

const CATALOG: [SynthProblem; 8] = [
    SynthProblem {
        name: "sum-sq",
        d: 2,
        range: (0.0, 1.0),
        noise_sigma: 0.0,
        formula: "x1 + x2^2",
        target: |x| x[0] + x[1] * x[1],
    },
    SynthProblem {
        name: "exp-cube-cos",
        d: 3,
        range: (-1.0, 1.0),
        noise_sigma: 0.05,
        formula: "x1 + x2 + cos(x3) + exp(x1^3)",
        target: |x| x[0] + x[1] + x[2].cos() + (x[0].powi(3)).exp(),
    },
    SynthProblem {
        name: "friedman1",
        d: 10,
        range: (0.0, 1.0),
        noise_sigma: 1.0,
        formula: "10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5  (x6..x10 unused)",
        target: |x| {
            10.0 * (PI * x[0] * x[1]).sin() + 20.0 * (x[2] - 0.5).powi(2) + 10.0 * x[3] + 5.0 * x[4]
        },
    },
    SynthProblem {
        name: "uball5d",
        d: 5,
        range: (0.05, 6.05),
        noise_sigma: 0.0,
        formula: "10 / (5 + sum_i (x_i - 3)^2)",
        target: |x| 10.0 / (5.0 + x.iter().map(|v| (v - 3.0).powi(2)).sum::<f64>()),
    },
    SynthProblem {
        name: "koza3",
        d: 1,
        range: (-1.0, 1.0),
        noise_sigma: 0.0,
        formula: "x1^6 - 2 x1^4 + x1^2",
        target: |x| x[0].powi(6) - 2.0 * x[0].powi(4) + x[0].powi(2),
    },
    SynthProblem {
        name: "nguyen7",
        d: 1,
        range: (0.0, 2.0),
        noise_sigma: 0.0,
        formula: "ln(x1 + 1) + ln(x1^2 + 1)",
        target: |x| (x[0] + 1.0).ln() + (x[0] * x[0] + 1.0).ln(),
    },
    SynthProblem {
        name: "pagie1",
        d: 2,
        range: (-5.0, 5.0),
        noise_sigma: 0.0,
        formula: "1 / (1 + x1^-4) + 1 / (1 + x2^-4)",
        target: |x| x.iter().map(|v| v.powi(4) / (1.0 + v.powi(4))).sum(),
    },
    SynthProblem {
        name: "interaction",
        d: 6,
        range: (-1.0, 1.0),
        noise_sigma: 0.1,
        formula: "x1 x2 + x3 x4 + sin(pi x5)  (x6 unused)",
        target: |x| x[0] * x[1] + x[2] * x[3] + (PI * x[4]).sin(),
    },
];

/// The catalog of synthetic regression problems.
pub fn catalog() -> &'static [SynthProblem] {
    &CATALOG
}

impl SynthProblem {
    pub fn lookup(name: &str) -> Result<&'static SynthProblem> {
        CATALOG
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::UnknownProblem(name.to_owned()))
    }

    pub fn generate<T: Scalar>(&self, n: usize, seed: u64) -> Result<Dataset<T>> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut rng = rng::seeded(seed);
        let mut columns = vec![Vec::with_capacity(n); self.d];
        let mut y = Vec::with_capacity(n);
        let mut row = vec![0.0; self.d];
        for _ in 0..n {
            for (j, v) in row.iter_mut().enumerate() {
                *v = rng.gen_range(self.range.0..self.range.1);
                columns[j].push(T::lit(*v));
            }
            let mut target = (self.target)(&row);
            if self.noise_sigma > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                target += self.noise_sigma * z;
            }
            y.push(T::lit(target));
        }
        let names = (1..=self.d).map(|i| format!("x{i}")).collect();
        Dataset::new(Matrix::from_columns(n, columns), y, names, "y")
    }
}

/// Draws `n` rows of catalog problem `name`.
pub fn synth_problem<T: Scalar>(name: &str, n: usize, seed: u64) -> Result<Dataset<T>> {
    SynthProblem::lookup(name)?.generate(n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_sq_formula() {
        let p = SynthProblem::lookup("sum-sq").unwrap();
        assert_eq!((p.target)(&[0.5, 0.5]), 0.75);
        let ds: Dataset<f64> = synth_problem("sum-sq", 4, 0).unwrap();
        for r in 0..4 {
            let x = ds.x().row(r);
            assert_eq!(ds.y()[r], x[0] + x[1] * x[1]);
        }
    }

    #[test]
    fn deterministic() {
        let a: Dataset<f64> = synth_problem("friedman1", 50, 3).unwrap();
        let b: Dataset<f64> = synth_problem("friedman1", 50, 3).unwrap();
        assert_eq!(a, b);
        let c: Dataset<f64> = synth_problem("friedman1", 50, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn widths_match_catalog() {
        assert_eq!(catalog().len(), 8);
        for p in catalog() {
            let ds: Dataset<f64> = synth_problem(p.name, 20, 1).unwrap();
            assert_eq!(ds.n_attributes(), p.d, "{}", p.name);
            assert_eq!(ds.n_rows(), 20);
            for c in 0..p.d {
                assert!(ds.x().col(c).iter().all(|v| *v >= p.range.0 && *v < p.range.1));
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            synth_problem::<f64>("nope", 10, 0),
            Err(Error::UnknownProblem(ref n)) if n == "nope"
        ));
    }
}
