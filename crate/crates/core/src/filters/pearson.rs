use crate::dataset::Dataset;
use crate::error::{Error, Result, Side};
use crate::ranking::FeatureRanking;

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}

/// Sample Pearson correlation, `cov(x, y) / (sd(x) sd(y))`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid("pearson arguments differ in length"));
    }
    if x.len() < 2 {
        return Err(Error::invalid("pearson needs at least two observations"));
    }
    if is_constant(x) {
        return Err(Error::UndefinedCorrelation(Side::X));
    }
    if is_constant(y) {
        return Err(Error::UndefinedCorrelation(Side::Y));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // The N - 1 factors of covariance and both deviations cancel.
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Rank features by `|rho|` against the target. Scores are the signed
/// correlations; zero-variance features are excluded and ranked last.
pub fn rank_pearson(d: &Dataset) -> Result<FeatureRanking> {
    let y = d.target().values();
    if is_constant(y) {
        return Err(Error::UndefinedCorrelation(Side::Y));
    }
    let p = d.n_features();
    let mut scores = vec![0.0; p];
    let mut keys = vec![None; p];
    let mut reasons = vec![None; p];
    for j in 0..p {
        match pearson(d.features().column(j), y) {
            Ok(rho) => {
                scores[j] = rho;
                keys[j] = Some(rho.abs());
            }
            Err(Error::UndefinedCorrelation(_)) => reasons[j] = Some("zero variance".to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(FeatureRanking::by_key(d.names(), &scores, &keys, &reasons))
}
