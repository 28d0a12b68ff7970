use crate::dataset::{Dataset, SplitIndices};
use crate::error::{Error, Result};
use crate::forest::{fit_forest, ForestSpec};

use super::auc::auc;
use super::methods::{select_features, Method, MethodParams};

/// Method name of the all-features row.
pub const BASELINE: &str = "baseline";

/// One feature's entry in a method row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureCell {
    pub feature: String,
    pub score: Option<f64>,
    pub rank: Option<usize>,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodRow {
    pub method: String,
    /// One cell per dataset feature, in column order.
    pub cells: Vec<FeatureCell>,
    pub train_auc: Option<f64>,
    pub validation_auc: Option<f64>,
}

impl MethodRow {
    /// True when the method selected nothing, so no forest was fitted.
    pub fn is_degenerate(&self) -> bool {
        !self.cells.iter().any(|c| c.selected)
    }

    pub fn selected(&self) -> Vec<&str> {
        self.cells
            .iter()
            .filter(|c| c.selected)
            .map(|c| c.feature.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub dataset_fingerprint: String,
    pub forest: ForestSpec,
    pub method_seed: u64,
    pub n_train: usize,
    pub n_validation: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    /// Baseline first, then the methods in the order requested.
    pub rows: Vec<MethodRow>,
    pub metadata: RunMetadata,
}

impl BenchmarkReport {
    pub fn row(&self, method: &str) -> Option<&MethodRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn baseline(&self) -> &MethodRow {
        &self.rows[0]
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.rows[0].cells.iter().map(|c| c.feature.as_str()).collect()
    }
}

/// Fit a forest on the given training columns and score both sides.
fn score_subset(train: &Dataset, valid: &Dataset, cols: &[usize], spec: &ForestSpec) -> Result<(f64, f64)> {
    let tr = train.select_columns(cols)?;
    let va = valid.select_columns(cols)?;
    let spec = ForestSpec {
        max_features: spec.max_features.map(|m| m.min(cols.len())),
        ..spec.clone()
    };
    let model = fit_forest(&tr, &spec)?;
    let train_auc = auc(&model.predict_proba(tr.features())?, &tr.target().labels())?.value;
    let valid_auc = auc(&model.predict_proba(va.features())?, &va.target().labels())?.value;
    Ok((train_auc, valid_auc))
}

/// Baseline forest on every feature, then for each method: select on the
/// training rows, refit a forest on the selected columns with the same
/// forest seed, and record train and validation AUC. A method that selects
/// nothing gets a row without AUCs.
pub fn run_benchmark(
    d: &Dataset,
    split: &SplitIndices,
    methods: &[Method],
    spec: &ForestSpec,
    params: &MethodParams,
) -> Result<BenchmarkReport> {
    run_benchmark_partial(d, split, methods, spec, params).map_err(|f| f.error)
}

/// A benchmark that stopped early. `completed` holds the rows finished
/// before the failure (absent if the baseline itself failed).
#[derive(Debug)]
pub struct BenchmarkFailure {
    pub completed: Option<BenchmarkReport>,
    pub method: Option<Method>,
    pub error: Error,
}

/// Like [`run_benchmark`], but a failing method hands back the rows that
/// were already done.
pub fn run_benchmark_partial(
    d: &Dataset,
    split: &SplitIndices,
    methods: &[Method],
    spec: &ForestSpec,
    params: &MethodParams,
) -> std::result::Result<BenchmarkReport, BenchmarkFailure> {
    let early = |error| BenchmarkFailure {
        completed: None,
        method: None,
        error,
    };
    if !d.is_scaled() {
        return Err(early(Error::invalid("benchmark expects a min-max scaled dataset")));
    }
    let train = d.select_rows(&split.train).map_err(early)?;
    let valid = d.select_rows(&split.validation).map_err(early)?;
    train.target().require_both_labels().map_err(early)?;
    valid.target().require_both_labels().map_err(early)?;
    let metadata = RunMetadata {
        dataset_fingerprint: d.fingerprint(),
        forest: spec.clone(),
        method_seed: params.seed,
        n_train: split.train.len(),
        n_validation: split.validation.len(),
    };

    let p = d.n_features();
    let all: Vec<usize> = (0..p).collect();
    let (train_auc, validation_auc) = score_subset(&train, &valid, &all, spec).map_err(early)?;
    let mut rows = vec![MethodRow {
        method: BASELINE.to_string(),
        cells: d
            .names()
            .iter()
            .map(|n| FeatureCell {
                feature: n.clone(),
                score: None,
                rank: None,
                selected: true,
            })
            .collect(),
        train_auc: Some(train_auc),
        validation_auc: Some(validation_auc),
    }];

    for &method in methods {
        match method_row(method, &train, &valid, spec, params) {
            Ok(row) => rows.push(row),
            Err(error) => {
                return Err(BenchmarkFailure {
                    completed: Some(BenchmarkReport { rows, metadata }),
                    method: Some(method),
                    error,
                })
            }
        }
    }

    Ok(BenchmarkReport { rows, metadata })
}

fn method_row(method: Method, train: &Dataset, valid: &Dataset, spec: &ForestSpec, params: &MethodParams) -> Result<MethodRow> {
    let p = train.n_features();
    let out = select_features(method, train, spec, params)?;
    let mut cells: Vec<Option<FeatureCell>> = vec![None; p];
    for e in &out.ranking.entries {
        cells[e.index] = Some(FeatureCell {
            feature: e.feature.clone(),
            score: e.score.is_finite().then_some(e.score),
            rank: Some(e.rank),
            selected: e.selected,
        });
    }
    let cells: Vec<FeatureCell> = cells.into_iter().map(|c| c.expect("ranking covers every feature")).collect();
    let selected = out.ranking.selected_indices();
    let (train_auc, validation_auc) = if selected.is_empty() {
        (None, None)
    } else {
        let (t, v) = score_subset(train, valid, &selected, spec)?;
        (Some(t), Some(v))
    };
    Ok(MethodRow {
        method: method.as_str().to_string(),
        cells,
        train_auc,
        validation_auc,
    })
}
