use std::fmt;
use std::str::FromStr;

use crate::dataset::{split, Dataset};
use crate::error::{Error, Result};
use crate::fealect::{
    bolasso_select, classify_features, fealect_score, rank_fealect, BolassoResult, FeaLectScore, FeatureClassification,
};
use crate::filters::{cfs_select, rank_pearson, CfsConfig, CfsOutcome};
use crate::forest::{fit_forest, permutation_importance, rank_by_importance, ForestSpec, ImportanceReport};
use crate::linear::{lambda_max, lasso_fit, ols_fit, rank_by_weights, ridge_fit, LassoFit, OlsFit, WeightVector};
use crate::ranking::FeatureRanking;
use crate::rfe::{rfe, RfeRanking};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Pearson,
    Cfs,
    Lasso,
    Ridge,
    Ols,
    RfPai,
    Rfe,
    FeaLect,
    Bolasso,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Pearson,
        Method::Cfs,
        Method::Lasso,
        Method::Ridge,
        Method::Ols,
        Method::RfPai,
        Method::Rfe,
        Method::FeaLect,
        Method::Bolasso,
    ];

    /// The filter, embedded and wrapper methods compared by default.
    pub const SIX: [Method; 6] = [
        Method::Pearson,
        Method::Cfs,
        Method::Lasso,
        Method::RfPai,
        Method::Rfe,
        Method::FeaLect,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pearson => "pearson",
            Method::Cfs => "cfs",
            Method::Lasso => "lasso",
            Method::Ridge => "ridge",
            Method::Ols => "ols",
            Method::RfPai => "rf-pai",
            Method::Rfe => "rfe",
            Method::FeaLect => "fealect",
            Method::Bolasso => "bolasso",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|m| m.as_str()).collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?}; expected one of {}", Self::names().join(", "))))
    }
}

/// LASSO penalty, either as given or as a fraction of the data's `lambda_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaChoice {
    Absolute(f64),
    Relative(f64),
}

impl LambdaChoice {
    pub fn resolve(self, d: &Dataset) -> f64 {
        match self {
            LambdaChoice::Absolute(l) => l,
            LambdaChoice::Relative(f) => f * lambda_max(d),
        }
    }
}

/// Per-method parameters and selection rules.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodParams {
    /// Pearson keeps features whose Fisher-z statistic
    /// `|atanh rho| sqrt(N - 3)` exceeds this.
    pub pearson_z: f64,
    pub cfs: CfsConfig,
    pub lasso_lambda: LambdaChoice,
    pub ridge_lambda: f64,
    pub pai_repeats: usize,
    /// RF-PAI keeps features whose mean importance exceeds this many
    /// standard errors over trees.
    pub pai_z: f64,
    /// RFE holds out this share of the training rows to score subsets.
    pub rfe_inner_fraction: f64,
    pub rfe_min_subset: usize,
    pub fealect_bootstraps: usize,
    pub bolasso_bootstraps: usize,
    pub seed: u64,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            pearson_z: 2.5758,
            cfs: CfsConfig::default(),
            lasso_lambda: LambdaChoice::Relative(0.1),
            ridge_lambda: 1.0,
            pai_repeats: 5,
            pai_z: 2.326,
            rfe_inner_fraction: 0.25,
            rfe_min_subset: 1,
            fealect_bootstraps: 100,
            bolasso_bootstraps: 32,
            seed: 0,
        }
    }
}

/// Method-specific result behind a ranking.
#[derive(Debug, Clone)]
pub enum MethodDetail {
    Pearson,
    Cfs(CfsOutcome),
    Lasso(LassoFit),
    Ridge(WeightVector),
    Ols(OlsFit),
    RfPai(ImportanceReport),
    Rfe(RfeRanking),
    FeaLect(FeaLectScore, FeatureClassification),
    Bolasso(BolassoResult),
}

#[derive(Debug, Clone)]
pub struct MethodOutput {
    pub method: Method,
    pub ranking: FeatureRanking,
    pub detail: MethodDetail,
}

/// Run one method on `d` and mark its selected features.
///
/// Selection rules: Pearson keeps significant correlations, CFS its best
/// subset, LASSO its support, ridge and OLS the coefficients above the mean
/// magnitude, RF-PAI the significantly positive importances, RFE its rank-1
/// subset, FeaLect the informative and redundant classes, Bolasso the
/// intersection of supports.
pub fn select_features(method: Method, d: &Dataset, spec: &ForestSpec, params: &MethodParams) -> Result<MethodOutput> {
    let stream = |name: &str| seed::derive(params.seed, name, 0);
    let (ranking, detail) = match method {
        Method::Pearson => {
            let mut r = rank_pearson(d)?;
            let root = (d.n_samples() as f64 - 3.0).max(0.0).sqrt();
            r.restrict_selection("not significant", |e| e.score.clamp(-1.0, 1.0).atanh().abs() * root > params.pearson_z);
            (r, MethodDetail::Pearson)
        }
        Method::Cfs => {
            let out = cfs_select(d, &params.cfs)?;
            (out.ranking.clone(), MethodDetail::Cfs(out))
        }
        Method::Lasso => {
            let fit = lasso_fit(d, params.lasso_lambda.resolve(d))?;
            (rank_by_weights(&fit.weights, d.names()), MethodDetail::Lasso(fit))
        }
        Method::Ridge => {
            let w = ridge_fit(d, params.ridge_lambda)?;
            (above_mean_magnitude(&w, d), MethodDetail::Ridge(w))
        }
        Method::Ols => {
            let fit = ols_fit(d)?;
            (above_mean_magnitude(&fit.weights, d), MethodDetail::Ols(fit))
        }
        Method::RfPai => {
            let forest_spec = ForestSpec {
                seed: stream("rf-pai-forest"),
                ..spec.clone()
            };
            let model = fit_forest(d, &forest_spec)?;
            let imp = permutation_importance(&model, d, params.pai_repeats, stream("rf-pai"))?;
            let sig = imp.significant(params.pai_z);
            let mut r = rank_by_importance(&imp);
            r.restrict_selection("not significant", |e| sig[e.index]);
            (r, MethodDetail::RfPai(imp))
        }
        Method::Rfe => {
            let inner = split(d, params.rfe_inner_fraction, stream("rfe-split"))?;
            let forest_spec = ForestSpec {
                seed: stream("rfe-forest"),
                ..spec.clone()
            };
            let out = rfe(d, &inner, &forest_spec, params.rfe_min_subset)?;
            (out.to_ranking(), MethodDetail::Rfe(out))
        }
        Method::FeaLect => {
            let s = fealect_score(d, params.fealect_bootstraps, stream("fealect"))?;
            let c = classify_features(&s);
            (rank_fealect(&s, &c), MethodDetail::FeaLect(s, c))
        }
        Method::Bolasso => {
            let out = bolasso_select(d, params.lasso_lambda.resolve(d), params.bolasso_bootstraps, stream("bolasso"))?;
            (out.ranking.clone(), MethodDetail::Bolasso(out))
        }
    };
    Ok(MethodOutput {
        method,
        ranking,
        detail,
    })
}

fn above_mean_magnitude(w: &WeightVector, d: &Dataset) -> FeatureRanking {
    let mut r = rank_by_weights(w, d.names());
    let mean = w.l1_norm() / w.weights.len() as f64;
    r.restrict_selection("below mean magnitude", |e| w.weights[e.index].abs() > mean);
    r
}
