use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::ForestModel;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::ranking::FeatureRanking;
use crate::seed;

/// Per-feature permutation accuracy importance, averaged over trees.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceReport {
    pub names: Vec<String>,
    pub mean: Vec<f64>,
    /// Population standard deviation over the trees that had OOB rows.
    pub std: Vec<f64>,
    pub repeats: usize,
    pub trees_used: usize,
}

impl ImportanceReport {
    /// Features whose mean importance exceeds `z` standard errors.
    pub fn significant(&self, z: f64) -> Vec<bool> {
        let root = (self.trees_used as f64).sqrt();
        self.mean
            .iter()
            .zip(&self.std)
            .map(|(m, s)| *m > 0.0 && *m > z * s / root)
            .collect()
    }

    /// `feature,pai_mean,pai_std`
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |source| Error::Io {
            path: "<importance output>".into(),
            source,
        };
        writeln!(w, "feature,pai_mean,pai_std").map_err(io)?;
        for ((name, m), s) in self.names.iter().zip(&self.mean).zip(&self.std) {
            writeln!(w, "{name},{m},{s}").map_err(io)?;
        }
        Ok(())
    }
}

/// Permutation accuracy importance on each tree's out-of-bag rows.
///
/// For every tree and feature the OOB column is shuffled `repeats` times;
/// the importance is the baseline OOB accuracy minus the mean permuted
/// accuracy. Only rows whose decision path tests the feature can change, so
/// only those are re-evaluated, starting at the first node that tests it. A
/// feature the tree never reaches on OOB rows scores exactly 0.
///
/// `d` must be the training data the forest was fitted on.
pub fn permutation_importance(m: &ForestModel, d: &Dataset, repeats: usize, seed: u64) -> Result<ImportanceReport> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    if d.n_samples() != m.n_samples() || d.n_features() != m.n_features() {
        return Err(Error::invalid("dataset does not match the forest's training data"));
    }
    let p = m.n_features();
    let x = d.features();
    let labels = d.target().labels();

    let per_tree: Vec<Option<Vec<f64>>> = (0..m.n_trees())
        .into_par_iter()
        .map(|t| {
            let tree = &m.trees()[t];
            let oob = m.oob(t);
            if oob.is_empty() {
                return None;
            }
            let correct: Vec<bool> = oob
                .iter()
                .map(|&i| (tree.leaf_probability(tree.descend(0, |j| x.get(i, j))) > 0.5) == labels[i])
                .collect();
            let base = correct.iter().filter(|&&c| c).count();

            // first[j]: (OOB position, first node on the path that tests j).
            let mut first: Vec<Vec<(usize, usize)>> = vec![Vec::new(); p];
            let mut stamp = vec![usize::MAX; p];
            for (k, &i) in oob.iter().enumerate() {
                let mut at = 0;
                while let super::Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } = &tree.nodes()[at]
                {
                    let f = *feature as usize;
                    if stamp[f] != k {
                        stamp[f] = k;
                        first[f].push((k, at));
                    }
                    at = if x.get(i, f) <= *threshold { *left } else { *right } as usize;
                }
            }

            let mut rng = seed::rng(seed, "pai", t as u64);
            let mut column: Vec<f64> = Vec::with_capacity(oob.len());
            let pai = (0..p)
                .map(|j| {
                    if first[j].is_empty() {
                        return 0.0;
                    }
                    let affected_base = first[j].iter().filter(|(k, _)| correct[*k]).count();
                    let mut permuted_total = 0usize;
                    for _ in 0..repeats {
                        column.clear();
                        column.extend(oob.iter().map(|&i| x.get(i, j)));
                        column.shuffle(&mut rng);
                        let hits = first[j]
                            .iter()
                            .filter(|&&(k, node)| {
                                let i = oob[k];
                                let leaf = tree.descend(node, |f| if f == j { column[k] } else { x.get(i, f) });
                                (tree.leaf_probability(leaf) > 0.5) == labels[i]
                            })
                            .count();
                        permuted_total += base - affected_base + hits;
                    }
                    (base as f64 - permuted_total as f64 / repeats as f64) / oob.len() as f64
                })
                .collect();
            Some(pai)
        })
        .collect();

    let used: Vec<&Vec<f64>> = per_tree.iter().flatten().collect();
    if used.is_empty() {
        return Err(Error::invalid("every tree has an empty out-of-bag set"));
    }
    let t = used.len() as f64;
    let mean: Vec<f64> = (0..p).map(|j| used.iter().map(|v| v[j]).sum::<f64>() / t).collect();
    let std = (0..p)
        .map(|j| (used.iter().map(|v| (v[j] - mean[j]).powi(2)).sum::<f64>() / t).sqrt())
        .collect();
    Ok(ImportanceReport {
        names: m.names().to_vec(),
        mean,
        std,
        repeats,
        trees_used: used.len(),
    })
}

/// Rank by mean importance; every feature starts selected.
pub fn rank_by_importance(r: &ImportanceReport) -> FeatureRanking {
    let keys: Vec<Option<f64>> = r.mean.iter().map(|&m| Some(m)).collect();
    FeatureRanking::by_key(&r.names, &r.mean, &keys, &vec![None; r.names.len()])
}
