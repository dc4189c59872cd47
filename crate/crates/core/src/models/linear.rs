//! Ridge regression through the regularized normal equations.

use nalgebra::{DMatrix, DVector};

use crate::data::LabeledDataset;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearParams {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

/// Solves `(XᵀX + λI) w = Xᵀy`.
///
/// With an intercept, X and y are centered first, which leaves the intercept
/// unpenalized. Singular systems (λ = 0 with a rank-deficient design) fall
/// back to the minimum-norm least-squares solution.
pub(crate) fn fit_ridge(data: &LabeledDataset, lambda: f64, intercept: bool) -> LinearParams {
    let n = data.len();
    let d = data.dim();
    let (x_mean, y_mean) = if intercept {
        let mut xm = vec![0.0; d];
        for (x, _) in data.rows() {
            for (m, v) in xm.iter_mut().zip(x) {
                *m += v;
            }
        }
        xm.iter_mut().for_each(|m| *m /= n as f64);
        (xm, data.targets().iter().sum::<f64>() / n as f64)
    } else {
        (vec![0.0; d], 0.0)
    };

    let mut gram = DMatrix::<f64>::zeros(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    let mut centered = vec![0.0; d];
    for (x, y) in data.rows() {
        for ((c, v), m) in centered.iter_mut().zip(x).zip(&x_mean) {
            *c = v - m;
        }
        let yc = y - y_mean;
        for i in 0..d {
            rhs[i] += centered[i] * yc;
            for j in 0..=i {
                gram[(i, j)] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            gram[(j, i)] = gram[(i, j)];
        }
        gram[(i, i)] += lambda;
    }

    let weights = match gram.clone().cholesky() {
        Some(chol) => chol.solve(&rhs),
        None => gram
            .svd(true, true)
            .solve(&rhs, 1e-10)
            .unwrap_or_else(|_| DVector::zeros(d)),
    };
    let weights: Vec<f64> = weights.iter().copied().collect();
    let intercept = y_mean - weights.iter().zip(&x_mean).map(|(w, m)| w * m).sum::<f64>();
    LinearParams { weights, intercept }
}
