use crate::dataset::Dataset;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::model::FeatureStats;
use crate::program::tree::Program;
use crate::Scalar;

/// A candidate representation: a set of programs plus the linear model last
/// fitted on top of them.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual<T> {
    pub programs: Vec<Program<T>>,
    /// One coefficient per program once fitted, empty before.
    pub coefficients: Vec<T>,
    pub intercept: T,
    /// Training MSE of the fitted model; infinite before fitting.
    pub fitness_mse: T,
    /// Total node count over all programs.
    pub complexity: usize,
    pub feature_stats: Vec<FeatureStats<T>>,
    /// Entanglement of the training-set feature outputs.
    pub entanglement: T,
}

impl<T: Scalar> Individual<T> {
    /// An unfitted individual.
    pub fn new(programs: Vec<Program<T>>) -> Self {
        assert!(!programs.is_empty(), "an individual needs at least one program");
        let complexity = programs.iter().map(Program::node_count).sum();
        Self {
            programs,
            coefficients: Vec::new(),
            intercept: T::zero(),
            fitness_mse: T::infinity(),
            complexity,
            feature_stats: Vec::new(),
            entanglement: T::zero(),
        }
    }

    #[inline]
    pub fn dimensionality(&self) -> usize {
        self.programs.len()
    }

    pub fn is_fitted(&self) -> bool {
        self.coefficients.len() == self.programs.len()
            && self.feature_stats.len() == self.programs.len()
            && self.fitness_mse.is_finite()
    }

    pub fn max_depth(&self) -> usize {
        self.programs.iter().map(Program::depth).max().unwrap_or(0)
    }

    /// Raw program outputs as an N × m matrix.
    pub fn feature_matrix(&self, ds: &Dataset<T>) -> Result<Matrix<T>> {
        let cols = self
            .programs
            .iter()
            .map(|p| p.evaluate(ds))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(ds.n_rows(), cols))
    }

    /// Program outputs standardized with the stored training statistics.
    /// Constant features map to zero.
    pub fn normalized_features(&self, ds: &Dataset<T>) -> Result<Matrix<T>> {
        let mut phi = self.feature_matrix(ds)?;
        for (j, s) in self.feature_stats.iter().enumerate() {
            for v in phi.col_mut(j) {
                *v = s.apply(*v);
            }
        }
        Ok(phi)
    }
}
