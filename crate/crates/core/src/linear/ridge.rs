use nalgebra::DMatrix;

use super::{Centered, WeightVector};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Minimizer of `||y_c - X_c w||^2 + lambda2 ||w||^2` on centered data.
pub fn ridge_fit(d: &Dataset, lambda2: f64) -> Result<WeightVector> {
    if !(lambda2 > 0.0 && lambda2.is_finite()) {
        return Err(Error::invalid(format!("ridge penalty must be positive, got {lambda2}")));
    }
    let c = Centered::new(d);
    let p = d.n_features();
    let gram = c.x.transpose() * &c.x + DMatrix::identity(p, p) * lambda2;
    let rhs = c.x.transpose() * &c.y;
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Numerical("ridge normal equations are not positive definite".into()))?;
    let w = chol.solve(&rhs);
    Ok(c.weights(w.iter().copied().collect()))
}
