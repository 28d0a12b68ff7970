use super::{Centered, WeightVector};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoConfig {
    /// Stop once a full sweep changes no coefficient by this much.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_sweeps: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub weights: WeightVector,
    pub lambda: f64,
    pub sweeps: usize,
    /// Objective value after each sweep.
    pub objective: Vec<f64>,
}

#[inline]
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

pub fn lasso_fit(d: &Dataset, lambda: f64) -> Result<LassoFit> {
    lasso_fit_with(d, lambda, &LassoConfig::default())
}

/// Cyclic coordinate descent with soft-thresholding on centered data.
///
/// The objective is checked after every sweep; an increase beyond rounding
/// is reported as a numerical failure.
pub fn lasso_fit_with(d: &Dataset, lambda: f64, config: &LassoConfig) -> Result<LassoFit> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lasso penalty must be non-negative, got {lambda}")));
    }
    let c = Centered::new(d);
    let n = c.n() as f64;
    let p = d.n_features();
    let sq: Vec<f64> = (0..p)
        .map(|j| c.column(j).iter().map(|v| v * v).sum::<f64>() / n)
        .collect();

    let mut w = vec![0.0; p];
    let mut r: Vec<f64> = c.y.iter().copied().collect();
    let objective_of = |r: &[f64], w: &[f64]| {
        r.iter().map(|v| v * v).sum::<f64>() / (2.0 * n) + lambda * w.iter().map(|v| v.abs()).sum::<f64>()
    };
    let mut objective = Vec::new();
    let mut prev = objective_of(&r, &w);

    for sweep in 1..=config.max_sweeps {
        let mut max_change: f64 = 0.0;
        for j in 0..p {
            if sq[j] == 0.0 {
                continue;
            }
            let col = c.column(j);
            let old = w[j];
            let rho = col.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() / n + sq[j] * old;
            let new = soft_threshold(rho, lambda) / sq[j];
            let delta = new - old;
            if delta != 0.0 {
                for (ri, xi) in r.iter_mut().zip(col) {
                    *ri -= delta * xi;
                }
                w[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        let obj = objective_of(&r, &w);
        if obj > prev + 1e-12 * prev.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "lasso objective rose from {prev} to {obj} in sweep {sweep}"
            )));
        }
        objective.push(obj);
        prev = obj;
        if max_change < config.tol {
            return Ok(LassoFit {
                weights: c.weights(w),
                lambda,
                sweeps: sweep,
                objective,
            });
        }
    }
    Err(Error::NonConvergence {
        sweeps: config.max_sweeps,
        last: c.weights(w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureMatrix, TargetVector};
    use crate::linear::lambda_max;

    fn small() -> Dataset {
        let m = FeatureMatrix::from_columns(
            &[
                vec![0.1, 0.5, 0.9, 0.3, 0.7, 0.2],
                vec![1.0, 0.0, 1.0, 1.0, 0.0, 0.5],
            ],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let y = vec![0.3, 1.1, 2.0, 0.9, 1.2, 0.4];
        Dataset::new(m, TargetVector::continuous(y).unwrap()).unwrap()
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
    }

    #[test]
    fn at_lambda_max_everything_is_zero() {
        let d = small();
        let fit = lasso_fit(&d, lambda_max(&d)).unwrap();
        assert!(fit.weights.weights.iter().all(|&w| w == 0.0));
        let mean = d.target().values().iter().sum::<f64>() / 6.0;
        assert!((fit.weights.intercept - mean).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_carries_last_iterate() {
        let d = small();
        let cfg = LassoConfig {
            tol: 0.0,
            max_sweeps: 3,
        };
        match lasso_fit_with(&d, 1e-4, &cfg) {
            Err(Error::NonConvergence { sweeps, last }) => {
                assert_eq!(sweeps, 3);
                assert_eq!(last.weights.len(), 2);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn negative_lambda_rejected() {
        assert!(lasso_fit(&small(), -1.0).is_err());
    }
}
