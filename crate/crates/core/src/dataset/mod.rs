//! Tabular datasets: ingestion, scaling, hotspot labeling and splitting.

mod io;
mod split;
mod synth;

use std::collections::HashSet;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use io::{load_csv, read_csv, write_csv};
pub use split::{split, SplitIndices};
pub use synth::{
    demo_dataset, synthesize, write_roles_csv, ColumnRole, Role, SynthSpec, SyntheticDataset, DEMO_SAMPLES, DEMO_SEED,
    HOTSPOT_FEATURE_NAMES,
};

/// Dense `N × p` feature matrix with unique, order-stable column names.
///
/// Storage is column-major, so a feature column is a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: DMatrix<f64>,
    names: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(values: DMatrix<f64>, names: Vec<String>) -> Result<Self> {
        if values.nrows() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 samples, got {}",
                values.nrows()
            )));
        }
        if values.ncols() == 0 {
            return Err(Error::invalid("need at least one feature"));
        }
        if names.len() != values.ncols() {
            return Err(Error::invalid(format!(
                "{} names for {} columns",
                names.len(),
                values.ncols()
            )));
        }
        let mut seen = HashSet::with_capacity(names.len());
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid(format!("duplicate feature name `{name}`")));
            }
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (i, j) = (pos % values.nrows(), pos / values.nrows());
            return Err(Error::invalid(format!(
                "non-finite value at sample {i}, feature `{}`",
                names[j]
            )));
        }
        Ok(Self { values, names })
    }

    /// Build from column vectors.
    pub fn from_columns(columns: &[Vec<f64>], names: Vec<String>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::invalid("columns have different lengths"));
        }
        let data: Vec<f64> = columns.iter().flatten().copied().collect();
        Self::new(DMatrix::from_vec(n, columns.len(), data), names)
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, j: usize) -> &str {
        &self.names[j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.n_samples();
        &self.values.as_slice()[j * n..(j + 1) * n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n_features()).map(|j| self.get(i, j)).collect()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let columns: Vec<Vec<f64>> = cols.iter().map(|&j| self.column(j).to_vec()).collect();
        let names = cols.iter().map(|&j| self.names[j].clone()).collect();
        Self::from_columns(&columns, names)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let p = self.n_features();
        let values = DMatrix::from_fn(rows.len(), p, |i, j| self.values[(rows[i], j)]);
        Self::new(values, self.names.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    kind: TargetKind,
    values: Vec<f64>,
}

impl TargetVector {
    pub fn continuous(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("target contains non-finite values"));
        }
        Ok(Self {
            kind: TargetKind::Continuous,
            values,
        })
    }

    /// Binary labels; every entry must be exactly 0 or 1.
    pub fn binary(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::invalid("binary target must contain only 0 and 1"));
        }
        Ok(Self {
            kind: TargetKind::Binary,
            values,
        })
    }

    pub fn from_labels(labels: &[bool]) -> Self {
        Self {
            kind: TargetKind::Binary,
            values: labels.iter().map(|&b| f64::from(u8::from(b))).collect(),
        }
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Labels as booleans. Only meaningful for binary targets.
    pub fn labels(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v == 1.0).collect()
    }

    pub fn positives(&self) -> usize {
        self.values.iter().filter(|&&v| v == 1.0).count()
    }

    /// Fails unless the target is binary with both labels present.
    pub fn require_both_labels(&self) -> Result<()> {
        if self.kind != TargetKind::Binary {
            return Err(Error::invalid("a binary target is required"));
        }
        let pos = self.positives();
        if pos == 0 || pos == self.len() {
            return Err(Error::invalid("binary target has a single label"));
        }
        Ok(())
    }

    fn select(&self, rows: &[usize]) -> Self {
        Self {
            kind: self.kind,
            values: rows.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// Features plus target. Immutable; every transformation returns a new value.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: FeatureMatrix,
    target: TargetVector,
    scaled: bool,
}

impl Dataset {
    pub fn new(features: FeatureMatrix, target: TargetVector) -> Result<Self> {
        if features.n_samples() != target.len() {
            return Err(Error::invalid(format!(
                "{} samples but target has length {}",
                features.n_samples(),
                target.len()
            )));
        }
        Ok(Self {
            features,
            target,
            scaled: false,
        })
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn target(&self) -> &TargetVector {
        &self.target
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn n_samples(&self) -> usize {
        self.features.n_samples()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_features()
    }

    pub fn names(&self) -> &[String] {
        self.features.names()
    }

    pub fn with_target(&self, target: TargetVector) -> Result<Self> {
        let mut d = Self::new(self.features.clone(), target)?;
        d.scaled = self.scaled;
        Ok(d)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        Ok(Self {
            features: self.features.select_rows(rows)?,
            target: self.target.select(rows),
            scaled: self.scaled,
        })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        Ok(Self {
            features: self.features.select_columns(cols)?,
            target: self.target.clone(),
            scaled: self.scaled,
        })
    }

    /// SHA-256 over column names, feature values and target values.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for name in self.names() {
            h.update(name.as_bytes());
            h.update([0u8]);
        }
        for v in self.features.matrix().iter().chain(self.target.values()) {
            h.update(v.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Map every column onto `[0, 1]` via `(x - min) / (max - min)`.
///
/// Constant columns become all zeros. Fails if the dataset is already scaled.
pub fn minmax_scale(d: &Dataset) -> Result<Dataset> {
    if d.scaled {
        return Err(Error::invalid("dataset is already min-max scaled"));
    }
    Ok(Dataset {
        features: minmax_scale_values(&d.features),
        target: d.target.clone(),
        scaled: true,
    })
}

/// The column transform behind [`minmax_scale`], without the flag check.
pub fn minmax_scale_values(m: &FeatureMatrix) -> FeatureMatrix {
    let n = m.n_samples();
    let mut data = Vec::with_capacity(n * m.n_features());
    for j in 0..m.n_features() {
        let col = m.column(j);
        let (lo, hi) = col
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let range = hi - lo;
        if range > 0.0 {
            data.extend(col.iter().map(|&v| ((v - lo) / range).clamp(0.0, 1.0)));
        } else {
            data.extend(std::iter::repeat_n(0.0, n));
        }
    }
    FeatureMatrix {
        values: DMatrix::from_vec(n, m.n_features(), data),
        names: m.names.clone(),
    }
}

/// Percentile of already sorted data, linearly interpolated between order
/// statistics at position `(n - 1) * q / 100`.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q / 100.0;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Output of [`label_hotspots`].
#[derive(Debug, Clone, PartialEq)]
pub struct HotspotLabels {
    pub target: TargetVector,
    pub threshold: f64,
    /// Set when no sample exceeds the threshold (e.g. constant stress).
    pub no_positives: bool,
}

/// Label samples whose stress is strictly greater than the given percentile.
pub fn label_hotspots(stress: &TargetVector, percentile: f64) -> Result<HotspotLabels> {
    if stress.kind() != TargetKind::Continuous {
        return Err(Error::invalid("hotspot labeling needs a continuous target"));
    }
    if !(percentile > 0.0 && percentile < 100.0) {
        return Err(Error::invalid(format!(
            "percentile must lie in (0, 100), got {percentile}"
        )));
    }
    if stress.is_empty() {
        return Err(Error::invalid("empty stress vector"));
    }
    let mut sorted = stress.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let threshold = percentile_sorted(&sorted, percentile);
    let labels: Vec<bool> = stress.values().iter().map(|&v| v > threshold).collect();
    let no_positives = !labels.iter().any(|&b| b);
    Ok(HotspotLabels {
        target: TargetVector::from_labels(&labels),
        threshold,
        no_positives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(cols: &[&[f64]]) -> FeatureMatrix {
        let names = (0..cols.len()).map(|j| format!("f{j}")).collect();
        let cols: Vec<Vec<f64>> = cols.iter().map(|c| c.to_vec()).collect();
        FeatureMatrix::from_columns(&cols, names).unwrap()
    }

    #[test]
    fn scale_three_points() {
        let m = minmax_scale_values(&matrix(&[&[2.0, 4.0, 6.0], &[7.0, 7.0, 7.0]]));
        assert_eq!(m.column(0), &[0.0, 0.5, 1.0]);
        assert_eq!(m.column(1), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn double_scaling_is_rejected() {
        let d = Dataset::new(
            matrix(&[&[1.0, 2.0]]),
            TargetVector::continuous(vec![0.0, 1.0]).unwrap(),
        )
        .unwrap();
        let s = minmax_scale(&d).unwrap();
        assert!(s.is_scaled());
        assert!(minmax_scale(&s).is_err());
    }

    #[test]
    fn hotspot_threshold_one_to_ten() {
        let stress = TargetVector::continuous((1..=10).map(f64::from).collect()).unwrap();
        let out = label_hotspots(&stress, 90.0).unwrap();
        assert!((out.threshold - 9.1).abs() < 1e-12);
        assert_eq!(out.target.positives(), 1);
        assert_eq!(out.target.values()[9], 1.0);
    }

    #[test]
    fn constant_stress_has_no_hotspots() {
        let stress = TargetVector::continuous(vec![3.0; 8]).unwrap();
        let out = label_hotspots(&stress, 90.0).unwrap();
        assert!(out.no_positives);
        assert_eq!(out.target.positives(), 0);
    }

    #[test]
    fn hotspot_percentile_bounds() {
        let stress = TargetVector::continuous(vec![1.0, 2.0]).unwrap();
        assert!(label_hotspots(&stress, 0.0).is_err());
        assert!(label_hotspots(&stress, 100.0).is_err());
        let binary = TargetVector::binary(vec![0.0, 1.0]).unwrap();
        assert!(label_hotspots(&binary, 90.0).is_err());
    }

    #[test]
    fn rejects_duplicate_names_and_nan() {
        let cols = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert!(FeatureMatrix::from_columns(&cols, vec!["a".into(), "a".into()]).is_err());
        let cols = vec![vec![1.0, f64::NAN]];
        assert!(FeatureMatrix::from_columns(&cols, vec!["a".into()]).is_err());
    }

    #[test]
    fn single_label_target_detected() {
        let t = TargetVector::binary(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(t.require_both_labels().is_err());
    }
}
