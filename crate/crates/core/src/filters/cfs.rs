use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use rayon::prelude::*;

use super::entropy::{discretize, symmetrical_uncertainty, DiscretizedColumn};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::ranking::{FeatureRanking, RankedFeature};

/// Symmetric table of pairwise feature-feature symmetrical uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct SuTable {
    p: usize,
    values: Vec<f64>,
}

impl SuTable {
    pub fn zeros(p: usize) -> Self {
        Self {
            p,
            values: vec![0.0; p * p],
        }
    }

    /// Build from a full row-major matrix; only the upper triangle is read.
    pub fn from_fn(p: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(p);
        for i in 0..p {
            for j in i + 1..p {
                t.set(i, j, f(i, j));
            }
        }
        t
    }

    pub fn len(&self) -> usize {
        self.p
    }

    pub fn is_empty(&self) -> bool {
        self.p == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.p + j] = v;
        self.values[j * self.p + i] = v;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeritResult {
    /// Sorted feature indices.
    pub subset: Vec<usize>,
    pub k: usize,
    pub r_cf_bar: f64,
    pub r_ff_bar: f64,
    pub merit: f64,
}

/// CFS merit `k r_cf / sqrt(k + k (k - 1) r_ff)` of a feature subset, with
/// `r_cf` the mean feature-target SU and `r_ff` the mean pairwise SU.
pub fn cfs_merit(subset: &[usize], su_target: &[f64], su_pairs: &SuTable) -> Result<MeritResult> {
    if subset.is_empty() {
        return Err(Error::invalid("CFS merit of an empty subset"));
    }
    if let Some(&bad) = subset.iter().find(|&&j| j >= su_target.len() || j >= su_pairs.len()) {
        return Err(Error::invalid(format!("feature {bad} has no SU values")));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(merit_unchecked(sorted, su_target, su_pairs))
}

fn merit_unchecked(subset: Vec<usize>, su_target: &[f64], su_pairs: &SuTable) -> MeritResult {
    let k = subset.len();
    let kf = k as f64;
    let r_cf_bar = subset.iter().map(|&j| su_target[j]).sum::<f64>() / kf;
    let r_ff_bar = if k > 1 {
        let mut s = 0.0;
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[a + 1..] {
                s += su_pairs.get(i, j);
            }
        }
        s / (kf * (kf - 1.0) / 2.0)
    } else {
        0.0
    };
    let merit = kf * r_cf_bar / (kf + kf * (kf - 1.0) * r_ff_bar).sqrt();
    MeritResult {
        subset,
        k,
        r_cf_bar,
        r_ff_bar,
        merit,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The expansion budget ran out.
    Budget,
    /// Several consecutive expansions failed to improve the best merit.
    Plateau,
    /// Every reachable subset was expanded.
    Exhausted,
}

/// Subsets in the order they were evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    pub visited: Vec<(Vec<usize>, f64)>,
    pub expansions: usize,
    pub stop_reason: StopReason,
}

impl SearchTrace {
    pub fn best_merit(&self) -> f64 {
        self.visited
            .iter()
            .map(|(_, m)| *m)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfsConfig {
    pub bins: usize,
    /// Consecutive non-improving expansions before stopping.
    pub plateau: usize,
    /// Expansion cap; `None` means `10 * p`.
    pub max_expansions: Option<usize>,
}

impl Default for CfsConfig {
    fn default() -> Self {
        Self {
            bins: 10,
            plateau: 5,
            max_expansions: None,
        }
    }
}

struct Node {
    merit: f64,
    subset: Vec<usize>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Max-heap on merit; on ties the lexicographically smaller subset pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.merit
            .total_cmp(&other.merit)
            .then_with(|| other.subset.cmp(&self.subset))
    }
}

/// Best-first forward search over subsets of `candidates`.
///
/// Starts from the empty set; each expansion pops the best open subset and
/// evaluates every single-feature addition not seen before. Stops after
/// `plateau` consecutive expansions that do not raise the best merit, when the
/// expansion budget is spent, or when the open list empties.
pub fn cfs_search(
    su_target: &[f64],
    su_pairs: &SuTable,
    candidates: &[usize],
    config: &CfsConfig,
) -> Result<(MeritResult, SearchTrace)> {
    if candidates.is_empty() {
        return Err(Error::invalid("CFS search needs at least one candidate feature"));
    }
    let mut candidates = candidates.to_vec();
    candidates.sort_unstable();
    candidates.dedup();
    if candidates.iter().any(|&j| j >= su_target.len() || j >= su_pairs.len()) {
        return Err(Error::invalid("candidate feature without SU values"));
    }
    let budget = config
        .max_expansions
        .unwrap_or(10 * su_target.len())
        .max(1);

    let mut open = BinaryHeap::new();
    open.push(Node {
        merit: 0.0,
        subset: Vec::new(),
    });
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(Vec::new());
    let mut best: Option<MeritResult> = None;
    let mut visited = Vec::new();
    let mut expansions = 0;
    let mut stale = 0;

    let stop_reason = loop {
        let Some(node) = open.pop() else {
            break StopReason::Exhausted;
        };
        expansions += 1;
        let mut improved = false;
        for &j in &candidates {
            if node.subset.binary_search(&j).is_ok() {
                continue;
            }
            let mut child = node.subset.clone();
            let pos = child.partition_point(|&x| x < j);
            child.insert(pos, j);
            if !seen.insert(child.clone()) {
                continue;
            }
            let m = merit_unchecked(child, su_target, su_pairs);
            visited.push((m.subset.clone(), m.merit));
            if best.as_ref().is_none_or(|b| m.merit > b.merit) {
                best = Some(m.clone());
                improved = true;
            }
            open.push(Node {
                merit: m.merit,
                subset: m.subset,
            });
        }
        stale = if improved { 0 } else { stale + 1 };
        if stale >= config.plateau {
            break StopReason::Plateau;
        }
        if expansions >= budget {
            break StopReason::Budget;
        }
    };

    let best = best.expect("the empty subset always has at least one child");
    Ok((
        best,
        SearchTrace {
            visited,
            expansions,
            stop_reason,
        },
    ))
}

/// Result of [`cfs_select`]: the ranking marks the best subset as selected.
#[derive(Debug, Clone)]
pub struct CfsOutcome {
    pub ranking: FeatureRanking,
    pub best: MeritResult,
    pub trace: SearchTrace,
    pub su_target: Vec<f64>,
}

/// Discretize every feature, compute SU tables and run [`cfs_search`].
///
/// Single-bin features are excluded up front. Scores in the ranking are the
/// feature-target SU; selected features rank first.
pub fn cfs_select(d: &Dataset, config: &CfsConfig) -> Result<CfsOutcome> {
    d.target().require_both_labels()?;
    let p = d.n_features();
    let y = DiscretizedColumn::from_labels(&d.target().labels());
    let columns: Vec<DiscretizedColumn> = (0..p)
        .into_par_iter()
        .map(|j| discretize(d.features().column(j), config.bins))
        .collect::<Result<_>>()?;
    let su_target: Vec<f64> = columns
        .par_iter()
        .map(|c| symmetrical_uncertainty(c, &y).map(|r| r.su))
        .collect::<Result<_>>()?;
    let candidates: Vec<usize> = (0..p).filter(|&j| !columns[j].degenerate).collect();
    if candidates.is_empty() {
        return Err(Error::invalid("every feature is constant"));
    }

    let pairs: Vec<(usize, usize)> = candidates
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| candidates[a + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| symmetrical_uncertainty(&columns[i], &columns[j]).map(|r| r.su))
        .collect::<Result<_>>()?;
    let mut su_pairs = SuTable::zeros(p);
    for (&(i, j), v) in pairs.iter().zip(values) {
        su_pairs.set(i, j, v);
    }

    let (best, trace) = cfs_search(&su_target, &su_pairs, &candidates, config)?;

    let in_best = |j: usize| best.subset.binary_search(&j).is_ok();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        let group = |j: usize| if in_best(j) { 0 } else if columns[j].degenerate { 2 } else { 1 };
        group(a)
            .cmp(&group(b))
            .then(su_target[b].total_cmp(&su_target[a]))
            .then(a.cmp(&b))
    });
    let entries = order
        .into_iter()
        .enumerate()
        .map(|(pos, j)| RankedFeature {
            feature: d.names()[j].clone(),
            index: j,
            score: su_target[j],
            rank: pos + 1,
            selected: in_best(j),
            excluded: if columns[j].degenerate {
                Some("single bin".into())
            } else if in_best(j) {
                None
            } else {
                Some("not in best subset".into())
            },
        })
        .collect();

    Ok(CfsOutcome {
        ranking: FeatureRanking { entries },
        best,
        trace,
        su_target,
    })
}
