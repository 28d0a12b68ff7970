//! Per-feature scores, ranks and selection flags shared by every method.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeature {
    pub feature: String,
    /// Column index in the dataset the ranking was computed on.
    pub index: usize,
    pub score: f64,
    /// 1-based position; excluded features come last.
    pub rank: usize,
    pub selected: bool,
    pub excluded: Option<String>,
}

/// Features in rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    pub entries: Vec<RankedFeature>,
}

impl FeatureRanking {
    /// Rank by `key` descending, ties by column order; features whose key is
    /// `None` are appended in column order with the given exclusion reason.
    /// All ranked (non-excluded) features start out selected.
    pub fn by_key(
        names: &[String],
        scores: &[f64],
        keys: &[Option<f64>],
        reasons: &[Option<String>],
    ) -> Self {
        let mut order: Vec<usize> = (0..names.len()).filter(|&j| keys[j].is_some()).collect();
        order.sort_by(|&a, &b| keys[b].unwrap().total_cmp(&keys[a].unwrap()).then(a.cmp(&b)));
        order.extend((0..names.len()).filter(|&j| keys[j].is_none()));
        let entries = order
            .into_iter()
            .enumerate()
            .map(|(pos, j)| RankedFeature {
                feature: names[j].clone(),
                index: j,
                score: scores[j],
                rank: pos + 1,
                selected: keys[j].is_some(),
                excluded: if keys[j].is_some() {
                    None
                } else {
                    reasons[j].clone().or_else(|| Some("excluded".into()))
                },
            })
            .collect();
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, feature: &str) -> Option<&RankedFeature> {
        self.entries.iter().find(|e| e.feature == feature)
    }

    /// Selected column indices in ascending column order.
    pub fn selected_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .entries
            .iter()
            .filter(|e| e.selected)
            .map(|e| e.index)
            .collect();
        idx.sort_unstable();
        idx
    }

    pub fn selected_names(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.selected)
            .map(|e| e.feature.as_str())
            .collect()
    }

    /// Keep only the features for which `keep` returns true selected; the
    /// others get `reason` unless they already carry one.
    pub fn restrict_selection(&mut self, reason: &str, mut keep: impl FnMut(&RankedFeature) -> bool) {
        for e in &mut self.entries {
            if e.selected && !keep(e) {
                e.selected = false;
                e.excluded.get_or_insert_with(|| reason.to_string());
            }
        }
    }

    /// `feature,score,rank,excluded_reason`
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |source| Error::Io {
            path: "<ranking output>".into(),
            source,
        };
        writeln!(w, "feature,score,rank,excluded_reason").map_err(io)?;
        for e in &self.entries {
            writeln!(
                w,
                "{},{},{},{}",
                e.feature,
                e.score,
                e.rank,
                e.excluded.as_deref().unwrap_or("")
            )
            .map_err(io)?;
        }
        Ok(())
    }
}
