//! Recursive feature elimination around the random forest.

use std::io::Write;

use crate::dataset::{Dataset, SplitIndices};
use crate::error::{Error, Result};
use crate::eval::auc;
use crate::forest::{fit_forest, permutation_importance, ForestSpec};
use crate::ranking::FeatureRanking;
use crate::seed;

/// Importance permutations per feature inside the elimination loop.
const RFE_REPEATS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct RfeRanking {
    pub names: Vec<String>,
    /// 1 for the selected subset, then 2, 3, ... for features eliminated
    /// progressively earlier.
    pub rank: Vec<usize>,
    /// Step at which each feature was removed; `None` if it survived the
    /// whole loop.
    pub eliminated_at_step: Vec<Option<usize>>,
    /// Validation AUC of the model fitted at each step; step `k` uses
    /// `p - k` features.
    pub step_auc: Vec<f64>,
    /// Features in elimination order, one per step.
    pub log: Vec<usize>,
    /// Step whose subset is selected.
    pub selected_step: usize,
}

impl RfeRanking {
    pub fn selected(&self) -> Vec<usize> {
        (0..self.names.len()).filter(|&j| self.rank[j] == 1).collect()
    }

    /// Eliminations that fall outside the selected subset.
    pub fn elimination_order(&self) -> &[usize] {
        &self.log[..self.selected_step]
    }

    /// AUC recorded at the step that removed the feature, or at the last
    /// step for survivors.
    pub fn feature_step_auc(&self, j: usize) -> f64 {
        let step = self.eliminated_at_step[j].unwrap_or(self.step_auc.len() - 1);
        self.step_auc[step]
    }

    pub fn to_ranking(&self) -> FeatureRanking {
        let keys: Vec<Option<f64>> = self.rank.iter().map(|&r| Some(-(r as f64))).collect();
        let scores: Vec<f64> = self.rank.iter().map(|&r| r as f64).collect();
        let mut r = FeatureRanking::by_key(&self.names, &scores, &keys, &vec![None; self.names.len()]);
        r.restrict_selection("eliminated", |e| self.rank[e.index] == 1);
        r
    }

    /// `feature,rank,eliminated_at_step,step_auc`
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |source| Error::Io {
            path: "<rfe output>".into(),
            source,
        };
        writeln!(w, "feature,rank,eliminated_at_step,step_auc").map_err(io)?;
        for j in 0..self.names.len() {
            let step = self.eliminated_at_step[j].map(|s| s.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{}", self.names[j], self.rank[j], step, self.feature_step_auc(j)).map_err(io)?;
        }
        Ok(())
    }
}

/// Backward elimination: fit on the training rows, score the validation
/// rows, drop the feature with the lowest permutation importance (ties drop
/// the higher column index), repeat down to `min_subset` features. The
/// subset with the highest validation AUC is selected; on ties the smaller
/// subset wins.
pub fn rfe(d: &Dataset, split: &SplitIndices, spec: &ForestSpec, min_subset: usize) -> Result<RfeRanking> {
    let p = d.n_features();
    if p < 2 {
        return Err(Error::invalid("rfe needs at least two features"));
    }
    if min_subset == 0 || min_subset > p {
        return Err(Error::invalid(format!("min_subset must be in 1..={p}")));
    }
    let train = d.select_rows(&split.train)?;
    let valid = d.select_rows(&split.validation)?;
    let valid_labels = valid.target().labels();
    train.target().require_both_labels()?;
    valid.target().require_both_labels()?;

    let mut current: Vec<usize> = (0..p).collect();
    let mut step_auc = Vec::new();
    let mut log = Vec::new();
    let mut eliminated_at_step = vec![None; p];
    loop {
        let step = step_auc.len();
        let tr = train.select_columns(&current)?;
        let sub_spec = ForestSpec {
            max_features: spec.max_features.map(|m| m.min(current.len())),
            ..spec.clone()
        };
        let model = fit_forest(&tr, &sub_spec)?;
        let proba = model.predict_proba(valid.select_columns(&current)?.features())?;
        step_auc.push(auc(&proba, &valid_labels)?.value);
        if current.len() <= min_subset {
            break;
        }
        let imp = permutation_importance(&model, &tr, RFE_REPEATS, seed::derive(spec.seed, "rfe", step as u64))?;
        let worst = (0..current.len())
            .rev()
            .min_by(|&a, &b| imp.mean[a].total_cmp(&imp.mean[b]))
            .expect("non-empty subset");
        let j = current.remove(worst);
        eliminated_at_step[j] = Some(step);
        log.push(j);
    }

    let best = step_auc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let selected_step = step_auc.iter().rposition(|&a| a == best).expect("at least one step");
    let rank = (0..p)
        .map(|j| match eliminated_at_step[j] {
            Some(k) if k < selected_step => selected_step - k + 1,
            _ => 1,
        })
        .collect();
    Ok(RfeRanking {
        names: d.names().to_vec(),
        rank,
        eliminated_at_step,
        step_auc,
        log,
        selected_step,
    })
}
