use rand::Rng;

use crate::Scalar;

/// Per-feature probabilities of being chosen for variation.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackProbs {
    pub pm: Vec<f64>,
}

impl FeedbackProbs {
    pub fn uniform(m: usize) -> Self {
        Self {
            pm: vec![1.0 / m as f64; m],
        }
    }

    pub fn len(&self) -> usize {
        self.pm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pm.is_empty()
    }

    /// Draws a feature index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>() * self.pm.iter().sum::<f64>();
        let mut acc = 0.0;
        for (i, p) in self.pm.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // rounding at the top end: last feature with non-zero mass
        self.pm.iter().rposition(|p| *p > 0.0).unwrap_or(0)
    }
}

/// Variation probabilities from model coefficients.
///
/// With `b_i = |β_i| / Σ|β|`, the feedback term is `s_i ∝ exp(1 − b_i)` under
/// softmax normalization and `s_i ∝ 1 − b_i` without it; the result is
/// `γ s_i + (1 − γ) / m`. Features with large coefficients are varied less.
/// All-zero coefficients give the uniform distribution.
pub fn feedback_probs<T: Scalar>(beta: &[T], gamma: f64, softmax_norm: bool) -> FeedbackProbs {
    let m = beta.len();
    assert!(m >= 1, "feedback needs at least one coefficient");
    let mags: Vec<f64> = beta.iter().map(|b| b.as_f64().abs()).collect();
    let total: f64 = mags.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return FeedbackProbs::uniform(m);
    }
    let rel: Vec<f64> = mags.iter().map(|b| b / total).collect();
    let s: Vec<f64> = if softmax_norm {
        let e: Vec<f64> = rel.iter().map(|b| (1.0 - b).exp()).collect();
        let z: f64 = e.iter().sum();
        e.into_iter().map(|v| v / z).collect()
    } else if m == 1 {
        vec![1.0]
    } else {
        let inv: Vec<f64> = rel.iter().map(|b| 1.0 - b).collect();
        let z: f64 = inv.iter().sum();
        inv.into_iter().map(|v| v / z).collect()
    };
    let uniform = 1.0 / m as f64;
    FeedbackProbs {
        pm: s.into_iter().map(|si| gamma * si + (1.0 - gamma) * uniform).collect(),
    }
}
