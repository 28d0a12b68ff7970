use super::{Centered, WeightVector};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub weights: WeightVector,
    /// Numerical rank of the centered design.
    pub rank: usize,
    /// Rank below the number of features; weights are the minimum-norm solution.
    pub degenerate: bool,
}

/// Least squares through the SVD of the centered design.
pub fn ols_fit(d: &Dataset) -> Result<OlsFit> {
    let c = Centered::new(d);
    let p = d.n_features();
    let svd = c.x.clone().svd(true, true);
    let s_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let tol = s_max * (c.n().max(p) as f64) * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let w = if rank == 0 {
        vec![0.0; p]
    } else {
        let sol = svd.solve(&c.y, tol).map_err(|e| Error::Numerical(e.to_string()))?;
        sol.iter().copied().collect()
    };
    Ok(OlsFit {
        weights: c.weights(w),
        rank,
        degenerate: rank < p,
    })
}
