use crate::dataset::LabelMap;
use crate::kernel::{KernelConfig, KernelKind};
use crate::matrix::FeatureMatrix;

/// A trained binary LS-SVM. Every training point is a support vector and
/// labels are folded into the weights, so the decision function is
/// `sum_i weights[i] * k(x_i, x) + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub kernel: KernelConfig,
    pub support_points: FeatureMatrix<f64>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub label_map: LabelMap,
    /// Number of training points of the +1 and -1 class, written as `nr_sv`.
    pub class_counts: [usize; 2],
}

impl Model {
    pub fn num_support_vectors(&self) -> usize {
        self.weights.len()
    }

    pub fn num_features(&self) -> usize {
        self.support_points.num_features()
    }

    /// LIBSVM's `rho`, the negated bias.
    pub fn rho(&self) -> f64 {
        -self.bias
    }

    /// Checks `sum(weights) == 0` to within `1e-10 * (1 + max|w|)` and the
    /// weight count.
    pub fn check_invariants(&self) -> bool {
        if self.weights.len() != self.support_points.num_points() {
            return false;
        }
        let sum: f64 = self.weights.iter().sum();
        let max = self.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        sum.abs() <= 1e-10 * (1.0 + max)
    }

    /// Explicit normal vector `w = sum_i alpha_i x_i`; only defined for the
    /// linear kernel.
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        if self.kernel.kind != KernelKind::Linear {
            return None;
        }
        let points = &self.support_points;
        let w = (0..points.num_features())
            .map(|j| {
                let column = &points.feature_column(j)[..points.num_points()];
                column
                    .iter()
                    .zip(&self.weights)
                    .map(|(x, a)| x * a)
                    .sum()
            })
            .collect();
        Some(w)
    }
}
