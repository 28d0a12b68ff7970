use std::collections::HashSet;
use std::io::Write;

use nalgebra::{DMatrix, DVector};

use super::{Centered, WeightVector};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// What happens to the active set at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathEvent {
    Enter(usize),
    Drop(usize),
    /// Penalty reached zero (or correlations vanished).
    End,
}

/// Piecewise-linear LASSO solution path.
///
/// Breakpoint `k` carries the penalty `lambdas[k]`, the coefficients there
/// and the active set of the segment that ends at it (so breakpoint 0, at
/// `lambda_max`, has an empty set). `events[k]` is the change applied at
/// breakpoint `k`, hence consecutive active sets differ by one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationPath {
    pub names: Vec<String>,
    pub lambdas: Vec<f64>,
    pub active_sets: Vec<Vec<usize>>,
    pub coefs: Vec<WeightVector>,
    pub events: Vec<PathEvent>,
    /// `(breakpoint, feature)` for features kept out because they are
    /// linearly dependent on the active set at that breakpoint.
    pub withheld: Vec<(usize, usize)>,
}

impl RegularizationPath {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambdas[0]
    }

    /// Coefficients at an arbitrary penalty, by linear interpolation between
    /// the bracketing breakpoints.
    pub fn coefficients_at(&self, lambda: f64) -> WeightVector {
        let last = self.len() - 1;
        if lambda >= self.lambdas[0] {
            return self.coefs[0].clone();
        }
        for k in 0..last {
            let (hi, lo) = (self.lambdas[k], self.lambdas[k + 1]);
            if hi > lo && lambda <= hi && lambda >= lo {
                let t = (hi - lambda) / (hi - lo);
                let (a, b) = (&self.coefs[k], &self.coefs[k + 1]);
                return WeightVector {
                    weights: a
                        .weights
                        .iter()
                        .zip(&b.weights)
                        .map(|(x, y)| x + t * (y - x))
                        .collect(),
                    intercept: a.intercept + t * (b.intercept - a.intercept),
                };
            }
        }
        self.coefs[last].clone()
    }

    /// Long format: `breakpoint,lambda,feature,coefficient`, one row per
    /// breakpoint and feature.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |source| Error::Io {
            path: "<path output>".into(),
            source,
        };
        writeln!(w, "breakpoint,lambda,feature,coefficient").map_err(io)?;
        for (k, (lam, coef)) in self.lambdas.iter().zip(&self.coefs).enumerate() {
            for (name, c) in self.names.iter().zip(&coef.weights) {
                writeln!(w, "{k},{lam},{name},{c}").map_err(io)?;
            }
        }
        Ok(())
    }
}

const COLLINEAR_TOL: f64 = 1e-10;

/// LASSO-modified least angle regression.
///
/// Works on the centered Gram matrix `G = X^T X / N` and `b = X^T y / N`,
/// so the current correlations are `b - G w` and the penalty equals their
/// common magnitude over the active set. Features enter when their
/// correlation reaches the active level and leave when their coefficient
/// crosses zero. At most `min(N - 1, p)` features are active; the path ends
/// at `lambda = 0`. Ties go to the lower column index, and a column that is
/// linearly dependent on the active set is withheld.
pub fn lars_path(d: &Dataset) -> Result<RegularizationPath> {
    let c = Centered::new(d);
    let n = c.n();
    let p = d.n_features();
    let g: DMatrix<f64> = c.x.tr_mul(&c.x) / n as f64;
    let b: DVector<f64> = c.x.tr_mul(&c.y) / n as f64;
    let constant: Vec<bool> = (0..p)
        .map(|j| {
            let col = d.features().column(j);
            col.iter().all(|&v| v == col[0])
        })
        .collect();
    let usable = constant.iter().filter(|&&k| !k).count();
    let max_active = usable.min(n.saturating_sub(1));

    let mut path = RegularizationPath {
        names: d.names().to_vec(),
        lambdas: Vec::new(),
        active_sets: Vec::new(),
        coefs: Vec::new(),
        events: Vec::new(),
        withheld: Vec::new(),
    };
    let mut w = vec![0.0; p];
    let first = (0..p)
        .filter(|&j| !constant[j])
        .fold(None, |best: Option<usize>, j| match best {
            Some(k) if b[k].abs() >= b[j].abs() => Some(k),
            _ => Some(j),
        });
    let lam0 = first.map_or(0.0, |j| b[j].abs());
    path.lambdas.push(lam0);
    path.active_sets.push(Vec::new());
    path.coefs.push(c.weights(w.clone()));
    let (Some(first), true) = (first, lam0 > 0.0 && max_active > 0) else {
        path.events.push(PathEvent::End);
        if lam0 > 0.0 {
            path.lambdas.push(0.0);
            path.active_sets.push(Vec::new());
            path.coefs.push(c.weights(w));
            path.events.push(PathEvent::End);
        }
        return Ok(path);
    };
    path.events.push(PathEvent::Enter(first));

    let eps = 1e-12 * lam0;
    let mut lam = lam0;
    let mut active = vec![first];
    let mut signs = vec![b[first].signum()];
    let mut corr = b.clone();
    let mut last_dropped: Option<usize> = None;
    let mut withheld_seen = HashSet::new();
    let max_iter = 50 * (p + 1);

    for _ in 0..max_iter {
        let k = active.len();
        let g_aa = DMatrix::from_fn(k, k, |r, s| g[(active[r], active[s])]);
        let chol = g_aa
            .cholesky()
            .ok_or_else(|| Error::Numerical("active Gram matrix is singular".into()))?;
        let dir = chol.solve(&DVector::from_column_slice(&signs));
        // Rate at which each correlation falls per unit decrease of lambda.
        let rate: Vec<f64> = (0..p)
            .map(|j| active.iter().zip(dir.iter()).map(|(&a, dv)| g[(j, a)] * dv).sum())
            .collect();

        let mut step = lam;
        let mut event = PathEvent::End;
        if k < max_active {
            for j in 0..p {
                if constant[j] || active.contains(&j) {
                    continue;
                }
                let g_aj = DVector::from_fn(k, |r, _| g[(active[r], j)]);
                let resid = g[(j, j)] - g_aj.dot(&chol.solve(&g_aj));
                if resid <= COLLINEAR_TOL * g[(j, j)] {
                    if withheld_seen.insert(j) {
                        path.withheld.push((path.lambdas.len() - 1, j));
                    }
                    continue;
                }
                for (num, den) in [(lam - corr[j], 1.0 - rate[j]), (lam + corr[j], 1.0 + rate[j])] {
                    if den <= 1e-12 {
                        continue;
                    }
                    let gamma = if num <= eps { 0.0 } else { num / den };
                    if last_dropped == Some(j) && gamma <= eps {
                        continue;
                    }
                    if gamma < step {
                        step = gamma;
                        event = PathEvent::Enter(j);
                    }
                }
            }
        }
        for (t, &j) in active.iter().enumerate() {
            if dir[t] != 0.0 {
                let gamma = -w[j] / dir[t];
                if gamma > eps && gamma < step {
                    step = gamma;
                    event = PathEvent::Drop(j);
                }
            }
        }

        for (t, &j) in active.iter().enumerate() {
            w[j] += step * dir[t];
        }
        lam = if event == PathEvent::End { 0.0 } else { (lam - step).max(0.0) };
        if let PathEvent::Drop(j) = event {
            w[j] = 0.0;
        }
        corr = &b - &g * DVector::from_column_slice(&w);

        let mut set = active.clone();
        set.sort_unstable();
        path.lambdas.push(lam);
        path.active_sets.push(set);
        path.coefs.push(c.weights(w.clone()));
        path.events.push(event);

        match event {
            PathEvent::End => return Ok(path),
            PathEvent::Enter(j) => {
                active.push(j);
                signs.push(if corr[j] == 0.0 { 1.0 } else { corr[j].signum() });
                last_dropped = None;
            }
            PathEvent::Drop(j) => {
                let t = active.iter().position(|&a| a == j).unwrap();
                active.remove(t);
                signs.remove(t);
                last_dropped = Some(j);
                if active.is_empty() {
                    return Err(Error::Numerical("LARS active set emptied mid-path".into()));
                }
            }
        }
        if lam <= 0.0 {
            return Ok(path);
        }
    }
    Err(Error::Numerical(format!("LARS did not finish within {max_iter} steps")))
}
