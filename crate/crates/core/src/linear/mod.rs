//! Linear regression models used as feature rankers: ordinary least squares,
//! ridge, the LASSO (coordinate descent) and the LASSO path (LARS).
//!
//! Every fit centers the columns and the target first, so the intercept is
//! never penalized. Penalized objectives use the `1 / (2N)` loss scaling:
//!
//! ```text
//! min_w  1/(2N) ||y - X w||^2 + lambda ||w||_1
//! ```

mod lars;
mod lasso;
mod ols;
mod ridge;

pub use lars::{lars_path, PathEvent, RegularizationPath};
pub use lasso::{lasso_fit, lasso_fit_with, soft_threshold, LassoConfig, LassoFit};
pub use ols::{ols_fit, OlsFit};
pub use ridge::ridge_fit;

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::ranking::FeatureRanking;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl WeightVector {
    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&j| self.weights[j] != 0.0)
            .collect()
    }

    pub fn predict(&self, d: &Dataset) -> Vec<f64> {
        let f = d.features();
        (0..d.n_samples())
            .map(|i| {
                self.intercept
                    + self
                        .weights
                        .iter()
                        .enumerate()
                        .map(|(j, w)| w * f.get(i, j))
                        .sum::<f64>()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyKind {
    None,
    Ridge,
    Lasso,
}

/// Penalty strength and type for [`fit_linear`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec {
    pub lambda: f64,
    pub kind: PenaltyKind,
}

impl PenaltySpec {
    pub fn none() -> Self {
        Self {
            lambda: 0.0,
            kind: PenaltyKind::None,
        }
    }

    pub fn ridge(lambda: f64) -> Self {
        Self {
            lambda,
            kind: PenaltyKind::Ridge,
        }
    }

    pub fn lasso(lambda: f64) -> Self {
        Self {
            lambda,
            kind: PenaltyKind::Lasso,
        }
    }
}

/// Dispatch on the penalty kind.
pub fn fit_linear(d: &Dataset, penalty: &PenaltySpec) -> Result<WeightVector> {
    if !(penalty.lambda >= 0.0 && penalty.lambda.is_finite()) {
        return Err(Error::invalid("penalty strength must be finite and non-negative"));
    }
    match penalty.kind {
        PenaltyKind::None => Ok(ols_fit(d)?.weights),
        PenaltyKind::Ridge => ridge_fit(d, penalty.lambda),
        PenaltyKind::Lasso => Ok(lasso_fit(d, penalty.lambda)?.weights),
    }
}

/// Mean-centered copy of a dataset's columns and target.
#[derive(Debug, Clone)]
pub(crate) struct Centered {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub x_mean: Vec<f64>,
    pub y_mean: f64,
}

impl Centered {
    pub fn new(d: &Dataset) -> Self {
        let n = d.n_samples();
        let f = d.features();
        let x_mean: Vec<f64> = (0..d.n_features())
            .map(|j| f.column(j).iter().sum::<f64>() / n as f64)
            .collect();
        let x = DMatrix::from_fn(n, d.n_features(), |i, j| f.get(i, j) - x_mean[j]);
        let yv = d.target().values();
        let y_mean = yv.iter().sum::<f64>() / n as f64;
        let y = DVector::from_iterator(n, yv.iter().map(|v| v - y_mean));
        Self {
            x,
            y,
            x_mean,
            y_mean,
        }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.x.as_slice()[j * n..(j + 1) * n]
    }

    pub fn weights(&self, w: Vec<f64>) -> WeightVector {
        let intercept = self.y_mean - w.iter().zip(&self.x_mean).map(|(a, m)| a * m).sum::<f64>();
        WeightVector {
            weights: w,
            intercept,
        }
    }
}

/// Smallest `lambda` at which the LASSO solution is identically zero,
/// `max_j |X_j^T y_c| / N` on centered data.
pub fn lambda_max(d: &Dataset) -> f64 {
    let c = Centered::new(d);
    let n = c.n() as f64;
    (0..d.n_features())
        .map(|j| {
            c.column(j)
                .iter()
                .zip(c.y.iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .abs()
                / n
        })
        .fold(0.0, f64::max)
}

/// Rank features by `|weight|`; exact zeros rank last and are unselected.
pub fn rank_by_weights(w: &WeightVector, names: &[String]) -> FeatureRanking {
    let keys: Vec<Option<f64>> = w
        .weights
        .iter()
        .map(|&v| (v != 0.0).then_some(v.abs()))
        .collect();
    let reasons = vec![Some("zero weight".to_string()); names.len()];
    FeatureRanking::by_key(names, &w.weights, &keys, &reasons)
}
