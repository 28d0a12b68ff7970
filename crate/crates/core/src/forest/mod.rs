//! Random-forest classifier with out-of-bag bookkeeping and permutation
//! accuracy importance.
//!
//! Trees are grown on bootstrap resamples with Gini splits over a random
//! subset of the features at every node. Each tree owns a random stream
//! derived from `(seed, tree index)`, so a fitted forest does not depend on
//! how many threads built it.

mod importance;
mod tree;

pub use importance::{permutation_importance, rank_by_importance, ImportanceReport};
pub use tree::{DecisionTree, Node};

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};
use crate::seed;
use tree::{GrowParams, Presorted};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestSpec {
    pub n_trees: usize,
    /// Candidate features per split; `None` means `ceil(sqrt(p))`.
    pub max_features: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestSpec {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features: None,
            min_samples_leaf: 1,
            max_depth: None,
            seed: 0,
        }
    }
}

impl ForestSpec {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Candidate count for `p` features.
    pub fn resolved_max_features(&self, p: usize) -> usize {
        self.max_features
            .unwrap_or_else(|| (p as f64).sqrt().ceil() as usize)
            .clamp(1, p.max(1))
    }

    fn validate(&self, p: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::invalid("n_trees must be at least 1"));
        }
        if let Some(m) = self.max_features {
            if m == 0 || m > p {
                return Err(Error::invalid(format!("max_features must be in 1..={p}, got {m}")));
            }
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::invalid("min_samples_leaf must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    trees: Vec<DecisionTree>,
    /// `in_bag[t][i]`: how often sample `i` was drawn for tree `t`.
    in_bag: Vec<Vec<u32>>,
    oob: Vec<Vec<usize>>,
    names: Vec<String>,
}

impl ForestModel {
    /// Assemble a model from prebuilt trees and their bootstrap counts.
    pub fn from_parts(trees: Vec<DecisionTree>, in_bag: Vec<Vec<u32>>, names: Vec<String>) -> Result<Self> {
        if trees.is_empty() || trees.len() != in_bag.len() {
            return Err(Error::invalid("need one bootstrap count vector per tree"));
        }
        let n = in_bag[0].len();
        if in_bag.iter().any(|c| c.len() != n) {
            return Err(Error::invalid("bootstrap count vectors differ in length"));
        }
        let oob = in_bag
            .iter()
            .map(|c| (0..n).filter(|&i| c[i] == 0).collect())
            .collect();
        Ok(Self {
            trees,
            in_bag,
            oob,
            names,
        })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    /// Training-set size.
    pub fn n_samples(&self) -> usize {
        self.in_bag[0].len()
    }

    pub fn in_bag(&self, tree: usize) -> &[u32] {
        &self.in_bag[tree]
    }

    pub fn oob(&self, tree: usize) -> &[usize] {
        &self.oob[tree]
    }

    /// Mean of the per-tree leaf probabilities for every row.
    pub fn predict_proba(&self, rows: &FeatureMatrix) -> Result<Vec<f64>> {
        if rows.n_features() != self.n_features() {
            return Err(Error::invalid(format!(
                "model has {} features, rows have {}",
                self.n_features(),
                rows.n_features()
            )));
        }
        let t = self.trees.len() as f64;
        Ok((0..rows.n_samples())
            .into_par_iter()
            .map(|i| {
                let sum: f64 = self
                    .trees
                    .iter()
                    .map(|tree| tree.leaf_probability(tree.descend(0, |j| rows.get(i, j))))
                    .sum();
                (sum / t).clamp(0.0, 1.0)
            })
            .collect())
    }

    /// Out-of-bag probability per training row, `None` for rows that were in
    /// every bootstrap.
    pub fn oob_proba(&self, train: &FeatureMatrix) -> Result<Vec<Option<f64>>> {
        if train.n_samples() != self.n_samples() || train.n_features() != self.n_features() {
            return Err(Error::invalid("rows do not match the training data"));
        }
        let mut sum = vec![0.0; self.n_samples()];
        let mut count = vec![0u32; self.n_samples()];
        for (t, tree) in self.trees.iter().enumerate() {
            for &i in &self.oob[t] {
                sum[i] += tree.leaf_probability(tree.descend(0, |j| train.get(i, j)));
                count[i] += 1;
            }
        }
        Ok(sum
            .into_iter()
            .zip(count)
            .map(|(s, c)| (c > 0).then(|| s / f64::from(c)))
            .collect())
    }

    /// Share of rows with an out-of-bag prediction that it classifies
    /// correctly at the 0.5 cut.
    pub fn oob_accuracy(&self, train: &Dataset) -> Result<f64> {
        let proba = self.oob_proba(train.features())?;
        let labels = train.target().labels();
        let (mut hit, mut total) = (0usize, 0usize);
        for (p, y) in proba.iter().zip(&labels) {
            if let Some(p) = p {
                total += 1;
                hit += usize::from((*p > 0.5) == *y);
            }
        }
        if total == 0 {
            return Err(Error::invalid("no out-of-bag rows"));
        }
        Ok(hit as f64 / total as f64)
    }
}

/// Fit a forest on a binary-target dataset.
pub fn fit_forest(d: &Dataset, spec: &ForestSpec) -> Result<ForestModel> {
    let p = d.n_features();
    spec.validate(p)?;
    d.target().require_both_labels()?;
    let n = d.n_samples();
    let columns: Vec<&[f64]> = (0..p).map(|j| d.features().column(j)).collect();
    let data = Presorted::new(&columns, d.target().labels());
    let params = GrowParams {
        max_features: spec.resolved_max_features(p),
        min_samples_leaf: spec.min_samples_leaf,
        max_depth: spec.max_depth,
    };
    let grown: Vec<(DecisionTree, Vec<u32>)> = (0..spec.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(spec.seed, "tree", t as u64);
            let mut counts = vec![0u32; n];
            for _ in 0..n {
                counts[rng.random_range(0..n)] += 1;
            }
            let tree = tree::grow(&data, &counts, &params, &mut rng);
            (tree, counts)
        })
        .collect();
    let (trees, in_bag) = grown.into_iter().unzip();
    ForestModel::from_parts(trees, in_bag, d.names().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::TargetVector;

    fn separable() -> Dataset {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let labels: Vec<bool> = (0..20).map(|i| i >= 10).collect();
        Dataset::new(
            FeatureMatrix::from_columns(&[x], vec!["x".into()]).unwrap(),
            TargetVector::from_labels(&labels),
        )
        .unwrap()
    }

    #[test]
    fn one_tree_fits_separable_data() {
        let d = separable();
        let spec = ForestSpec {
            n_trees: 1,
            ..ForestSpec::with_seed(3)
        };
        let m = fit_forest(&d, &spec).unwrap();
        let proba = m.predict_proba(d.features()).unwrap();
        let labels = d.target().labels();
        for i in (0..20).filter(|&i| m.in_bag(0)[i] > 0) {
            assert_eq!(proba[i] > 0.5, labels[i], "row {i}");
            assert!(proba[i] == 0.0 || proba[i] == 1.0);
        }
    }

    #[test]
    fn same_seed_same_tree() {
        let d = separable();
        let spec = ForestSpec {
            n_trees: 1,
            ..ForestSpec::with_seed(11)
        };
        assert_eq!(fit_forest(&d, &spec).unwrap(), fit_forest(&d, &spec).unwrap());
    }

    #[test]
    fn in_bag_sizes_and_oob_complement() {
        let d = separable();
        let m = fit_forest(&d, &ForestSpec::with_seed(1)).unwrap();
        for t in 0..m.n_trees() {
            assert_eq!(m.in_bag(t).iter().sum::<u32>() as usize, 20);
            for i in 0..20 {
                assert_eq!(m.in_bag(t)[i] == 0, m.oob(t).contains(&i));
            }
        }
    }

    #[test]
    fn hand_built_stumps_average() {
        let trees = vec![
            DecisionTree::stump(0, 0.5, 1.0, 1.0, 1),
            DecisionTree::stump(0, 0.5, 0.0, 0.0, 1),
            DecisionTree::stump(0, 0.5, 0.5, 0.5, 1),
        ];
        let m = ForestModel::from_parts(trees, vec![vec![1, 1]; 3], vec!["x".into()]).unwrap();
        let rows = FeatureMatrix::from_columns(&[vec![0.0, 1.0]], vec!["x".into()]).unwrap();
        assert_eq!(m.predict_proba(&rows).unwrap(), vec![0.5, 0.5]);
        let wide = FeatureMatrix::from_columns(&[vec![0.0, 1.0], vec![0.0, 1.0]], vec!["x".into(), "y".into()]).unwrap();
        assert!(m.predict_proba(&wide).is_err());
    }

    #[test]
    fn single_label_rejected() {
        let d = Dataset::new(
            FeatureMatrix::from_columns(&[vec![1.0, 2.0, 3.0]], vec!["x".into()]).unwrap(),
            TargetVector::from_labels(&[true, true, true]),
        )
        .unwrap();
        assert!(fit_forest(&d, &ForestSpec::default()).is_err());
    }

    #[test]
    fn spec_validation() {
        let d = separable();
        let bad = ForestSpec {
            max_features: Some(2),
            ..ForestSpec::default()
        };
        assert!(fit_forest(&d, &bad).is_err());
        let bad = ForestSpec {
            n_trees: 0,
            ..ForestSpec::default()
        };
        assert!(fit_forest(&d, &bad).is_err());
    }
}
