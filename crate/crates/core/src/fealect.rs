//! Bootstrap feature scoring over LASSO paths: Bolasso intersection selection
//! and FeaLect scores with a three-way informative / redundant / irrelevant
//! split.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linear::{lars_path, lasso_fit, RegularizationPath};
use crate::ranking::FeatureRanking;
use crate::seed;

/// `N` row indices drawn with replacement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BootstrapSample {
    pub indices: Vec<usize>,
    pub master_seed: u64,
    pub number: usize,
}

impl BootstrapSample {
    pub fn draw(n: usize, master_seed: u64, number: usize) -> Self {
        let mut rng = seed::rng(master_seed, "bootstrap", number as u64);
        let indices = (0..n).map(|_| rng.random_range(0..n)).collect();
        Self {
            indices,
            master_seed,
            number,
        }
    }

    pub fn apply(&self, d: &Dataset) -> Result<Dataset> {
        d.select_rows(&self.indices)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BolassoResult {
    /// Ranked by selection frequency; selected = in every support.
    pub ranking: FeatureRanking,
    /// Share of bootstraps whose support contains each feature (column order).
    pub frequency: Vec<f64>,
    pub supports: Vec<Vec<usize>>,
    /// True when the intersection is empty.
    pub empty: bool,
}

/// LASSO at a fixed penalty on `bootstraps` resamples; the selection is the
/// intersection of the supports.
pub fn bolasso_select(d: &Dataset, lambda: f64, bootstraps: usize, seed: u64) -> Result<BolassoResult> {
    if bootstraps == 0 {
        return Err(Error::invalid("bolasso needs at least one bootstrap"));
    }
    let p = d.n_features();
    let supports = (0..bootstraps)
        .into_par_iter()
        .map(|b| {
            let sample = BootstrapSample::draw(d.n_samples(), seed, b).apply(d)?;
            Ok(lasso_fit(&sample, lambda)?.weights.support())
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    let mut counts = vec![0usize; p];
    for s in &supports {
        for &j in s {
            counts[j] += 1;
        }
    }
    let frequency: Vec<f64> = counts.iter().map(|&c| c as f64 / bootstraps as f64).collect();
    let keys: Vec<Option<f64>> = frequency.iter().map(|&f| Some(f)).collect();
    let mut ranking = FeatureRanking::by_key(d.names(), &frequency, &keys, &vec![None; p]);
    ranking.restrict_selection("not in every support", |e| counts[e.index] == bootstraps);
    let empty = counts.iter().all(|&c| c < bootstraps);
    Ok(BolassoResult {
        ranking,
        frequency,
        supports,
        empty,
    })
}

/// How a single regularization path is turned into per-feature credit.
pub trait PathCredit: Sync {
    fn name(&self) -> &'static str;
    fn credit(&self, path: &RegularizationPath) -> Vec<f64>;
}

/// At every breakpoint whose active set has `k` members, each member earns
/// `1/k`. Early entry and staying active both raise the credit.
#[derive(Debug, Clone, Copy, Default)]
pub struct InverseActiveSize;

impl PathCredit for InverseActiveSize {
    fn name(&self) -> &'static str {
        "inverse-active-size"
    }

    fn credit(&self, path: &RegularizationPath) -> Vec<f64> {
        let mut c = vec![0.0; path.names.len()];
        for active in &path.active_sets {
            if active.is_empty() {
                continue;
            }
            let share = 1.0 / active.len() as f64;
            for &j in active {
                c[j] += share;
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeaLectScore {
    pub names: Vec<String>,
    pub score: Vec<f64>,
    /// `ln(1 + score)`.
    pub log_score: Vec<f64>,
    pub bootstraps: usize,
    /// Bootstraps whose path failed and were left out of the mean.
    pub dropped: usize,
    pub strategy: &'static str,
}

pub fn fealect_score(d: &Dataset, bootstraps: usize, seed: u64) -> Result<FeaLectScore> {
    fealect_score_with(d, bootstraps, seed, &InverseActiveSize)
}

/// Mean path credit over bootstrap resamples. A failed path drops its
/// bootstrap; more than 20% drops fails the run.
pub fn fealect_score_with(d: &Dataset, bootstraps: usize, seed: u64, strategy: &dyn PathCredit) -> Result<FeaLectScore> {
    if bootstraps < 2 {
        return Err(Error::invalid("fealect needs at least two bootstraps"));
    }
    let p = d.n_features();
    let credits: Vec<Option<Vec<f64>>> = (0..bootstraps)
        .into_par_iter()
        .map(|b| {
            let sample = BootstrapSample::draw(d.n_samples(), seed, b).apply(d).ok()?;
            lars_path(&sample).ok().map(|path| strategy.credit(&path))
        })
        .collect();
    let dropped = credits.iter().filter(|c| c.is_none()).count();
    if dropped * 5 > bootstraps {
        return Err(Error::Numerical(format!(
            "{dropped} of {bootstraps} bootstrap paths failed"
        )));
    }
    let kept = (bootstraps - dropped) as f64;
    let mut score = vec![0.0; p];
    for c in credits.iter().flatten() {
        for (s, v) in score.iter_mut().zip(c) {
            *s += v;
        }
    }
    for s in &mut score {
        *s /= kept;
    }
    let log_score = score.iter().map(|s| s.ln_1p()).collect();
    Ok(FeaLectScore {
        names: d.names().to_vec(),
        score,
        log_score,
        bootstraps,
        dropped,
        strategy: strategy.name(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureClass {
    Informative,
    Redundant,
    Irrelevant,
}

impl FeatureClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureClass::Informative => "informative",
            FeatureClass::Redundant => "redundant",
            FeatureClass::Irrelevant => "irrelevant",
        }
    }
}

/// Explicit log-score cut points, used instead of the gap rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassThresholds {
    /// Log-scores at or above this are informative.
    pub informative: f64,
    /// Log-scores at or above this (and below `informative`) are redundant.
    pub redundant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureClassification {
    /// Class per feature, in column order.
    pub classes: Vec<FeatureClass>,
    pub names: Vec<String>,
    /// The log-score boundaries that were applied.
    pub thresholds: Option<ClassThresholds>,
    pub warning: Option<String>,
}

impl FeatureClassification {
    fn members(&self, class: FeatureClass) -> Vec<&str> {
        self.names
            .iter()
            .zip(&self.classes)
            .filter(|(_, c)| **c == class)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn informative(&self) -> Vec<&str> {
        self.members(FeatureClass::Informative)
    }

    pub fn redundant(&self) -> Vec<&str> {
        self.members(FeatureClass::Redundant)
    }

    pub fn irrelevant(&self) -> Vec<&str> {
        self.members(FeatureClass::Irrelevant)
    }
}

/// Split at the two widest gaps of the sorted log-scores: above the upper
/// gap is informative, between them redundant, below irrelevant. Zero
/// scores are always irrelevant. With fewer than three distinct scores there
/// are no two gaps to use, so every scored feature is informative and a
/// warning is attached.
pub fn classify_features(s: &FeaLectScore) -> FeatureClassification {
    let mut sorted = s.log_score.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();
    if sorted.len() < 3 {
        let classes = s
            .score
            .iter()
            .map(|&v| if v > 0.0 { FeatureClass::Informative } else { FeatureClass::Irrelevant })
            .collect();
        return FeatureClassification {
            classes,
            names: s.names.clone(),
            thresholds: None,
            warning: Some(format!(
                "only {} distinct scores; every scored feature treated as informative",
                sorted.len()
            )),
        };
    }
    // Gap i lies between sorted[i] and sorted[i + 1]; ties keep the upper gap.
    let mut gaps: Vec<usize> = (0..sorted.len() - 1).collect();
    gaps.sort_by(|&a, &b| (sorted[b] - sorted[b + 1]).total_cmp(&(sorted[a] - sorted[a + 1])).then(a.cmp(&b)));
    let (upper, lower) = (gaps[0].min(gaps[1]), gaps[0].max(gaps[1]));
    let thresholds = ClassThresholds {
        informative: sorted[upper],
        redundant: sorted[lower],
    };
    let mut c = classify_with_thresholds(s, thresholds);
    c.thresholds = Some(thresholds);
    c
}

pub fn classify_with_thresholds(s: &FeaLectScore, t: ClassThresholds) -> FeatureClassification {
    let classes = s
        .score
        .iter()
        .zip(&s.log_score)
        .map(|(&v, &l)| {
            if v <= 0.0 {
                FeatureClass::Irrelevant
            } else if l >= t.informative {
                FeatureClass::Informative
            } else if l >= t.redundant {
                FeatureClass::Redundant
            } else {
                FeatureClass::Irrelevant
            }
        })
        .collect();
    FeatureClassification {
        classes,
        names: s.names.clone(),
        thresholds: Some(t),
        warning: None,
    }
}

/// Ranking by score with informative and redundant features selected.
pub fn rank_fealect(s: &FeaLectScore, c: &FeatureClassification) -> FeatureRanking {
    let keys: Vec<Option<f64>> = s.score.iter().map(|&v| Some(v)).collect();
    let mut r = FeatureRanking::by_key(&s.names, &s.score, &keys, &vec![None; s.names.len()]);
    r.restrict_selection("irrelevant", |e| c.classes[e.index] != FeatureClass::Irrelevant);
    r
}

/// `feature,score,log_score,class`
pub fn write_scores_csv<W: Write>(mut w: W, s: &FeaLectScore, c: &FeatureClassification) -> Result<()> {
    let io = |source| Error::Io {
        path: "<fealect output>".into(),
        source,
    };
    writeln!(w, "feature,score,log_score,class").map_err(io)?;
    for j in 0..s.names.len() {
        writeln!(w, "{},{},{},{}", s.names[j], s.score[j], s.log_score[j], c.classes[j].as_str()).map_err(io)?;
    }
    Ok(())
}
