use rand::seq::index;
use rand::Rng;

/// Tree node. Samples with `value <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        /// Weighted (bootstrap-multiplicity) class counts.
        negatives: f64,
        positives: f64,
    },
}

impl Node {
    pub fn leaf(negatives: f64, positives: f64) -> Self {
        Node::Leaf {
            negatives,
            positives,
        }
    }
}

/// Binary classification tree stored as a node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    uses: Vec<bool>,
}

impl DecisionTree {
    /// Build a tree from an arena. Panics if a child index is out of range.
    pub fn from_nodes(nodes: Vec<Node>, n_features: usize) -> Self {
        let mut uses = vec![false; n_features];
        for node in &nodes {
            if let Node::Split {
                feature,
                left,
                right,
                ..
            } = node
            {
                assert!((*left as usize) < nodes.len() && (*right as usize) < nodes.len());
                uses[*feature as usize] = true;
            }
        }
        Self { nodes, uses }
    }

    /// One split on `feature` with the given leaf probabilities, expressed as
    /// unit-weight leaves.
    pub fn stump(feature: usize, threshold: f64, left_prob: f64, right_prob: f64, n_features: usize) -> Self {
        Self::from_nodes(
            vec![
                Node::Split {
                    feature: feature as u32,
                    threshold,
                    left: 1,
                    right: 2,
                },
                Node::leaf(1.0 - left_prob, left_prob),
                Node::leaf(1.0 - right_prob, right_prob),
            ],
            n_features,
        )
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn uses_feature(&self, j: usize) -> bool {
        self.uses.get(j).copied().unwrap_or(false)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left as usize).max(go(nodes, *right as usize)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Leaf reached from node `start` reading feature values through `value`.
    #[inline]
    pub(crate) fn descend(&self, mut at: usize, value: impl Fn(usize) -> f64) -> usize {
        loop {
            match &self.nodes[at] {
                Node::Leaf { .. } => return at,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if value(*feature as usize) <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    #[inline]
    pub(crate) fn leaf_probability(&self, leaf: usize) -> f64 {
        match &self.nodes[leaf] {
            Node::Leaf {
                negatives,
                positives,
            } => positives / (negatives + positives),
            Node::Split { .. } => unreachable!("not a leaf"),
        }
    }

    pub fn predict_proba_row(&self, row: &[f64]) -> f64 {
        self.leaf_probability(self.descend(0, |j| row[j]))
    }
}

/// Column data prepared once per forest: per-feature sorted distinct values
/// and each sample's rank among them.
pub(crate) struct Presorted {
    pub n: usize,
    pub distinct: Vec<Vec<f64>>,
    /// Column-major `rank[j * n + i]`.
    pub rank: Vec<u32>,
    pub labels: Vec<bool>,
}

impl Presorted {
    pub fn new(columns: &[&[f64]], labels: Vec<bool>) -> Self {
        let n = labels.len();
        let mut distinct = Vec::with_capacity(columns.len());
        let mut rank = vec![0u32; n * columns.len()];
        for (j, col) in columns.iter().enumerate() {
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
            let mut values: Vec<f64> = Vec::new();
            for &i in &order {
                let v = col[i as usize];
                if values.last() != Some(&v) {
                    values.push(v);
                }
                rank[j * n + i as usize] = (values.len() - 1) as u32;
            }
            distinct.push(values);
        }
        Self {
            n,
            distinct,
            rank,
            labels,
        }
    }

    pub fn n_features(&self) -> usize {
        self.distinct.len()
    }
}

pub(crate) struct GrowParams {
    pub max_features: usize,
    pub min_samples_leaf: usize,
    pub max_depth: Option<usize>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    /// Highest rank sent left.
    cut_rank: u32,
    gain: f64,
}

/// Grow one tree on the bootstrap described by `weights` (multiplicity per
/// sample; zero means out of bag).
pub(crate) fn grow<R: Rng>(data: &Presorted, weights: &[u32], params: &GrowParams, rng: &mut R) -> DecisionTree {
    let p = data.n_features();
    let samples: Vec<u32> = (0..data.n as u32).filter(|&i| weights[i as usize] > 0).collect();
    let mut nodes: Vec<Node> = vec![Node::leaf(0.0, 0.0)];
    let mut stack: Vec<(usize, Vec<u32>, usize)> = vec![(0, samples, 0)];
    let mut scratch: Vec<(u32, u32)> = Vec::new();
    let min_leaf = params.min_samples_leaf.max(1) as f64;

    while let Some((slot, samples, depth)) = stack.pop() {
        let (mut neg, mut pos) = (0.0, 0.0);
        for &i in &samples {
            let w = f64::from(weights[i as usize]);
            if data.labels[i as usize] {
                pos += w;
            } else {
                neg += w;
            }
        }
        let total = neg + pos;
        let can_split = neg > 0.0
            && pos > 0.0
            && total >= 2.0 * min_leaf
            && params.max_depth.is_none_or(|m| depth < m);
        let best = if can_split {
            let mut candidates = index::sample(rng, p, params.max_features.min(p)).into_vec();
            candidates.sort_unstable();
            best_split(data, weights, &samples, &candidates, (neg, pos), min_leaf, &mut scratch)
        } else {
            None
        };
        let Some(best) = best else {
            nodes[slot] = Node::leaf(neg, pos);
            continue;
        };

        let ranks = &data.rank[best.feature * data.n..(best.feature + 1) * data.n];
        let (left, right): (Vec<u32>, Vec<u32>) = samples
            .iter()
            .partition(|&&i| ranks[i as usize] <= best.cut_rank);
        let (l, r) = (nodes.len(), nodes.len() + 1);
        nodes.push(Node::leaf(0.0, 0.0));
        nodes.push(Node::leaf(0.0, 0.0));
        nodes[slot] = Node::Split {
            feature: best.feature as u32,
            threshold: best.threshold,
            left: l as u32,
            right: r as u32,
        };
        debug_assert!(best.gain > 0.0);
        stack.push((r, right, depth + 1));
        stack.push((l, left, depth + 1));
    }
    DecisionTree::from_nodes(nodes, p)
}

/// Best Gini split over midpoints of consecutive distinct values. The score
/// `sum_c L_c^2 / L + sum_c R_c^2 / R` differs from the weighted Gini
/// decrease only by a node constant; ties keep the earlier feature, then the
/// lower threshold.
fn best_split(
    data: &Presorted,
    weights: &[u32],
    samples: &[u32],
    candidates: &[usize],
    (neg, pos): (f64, f64),
    min_leaf: f64,
    scratch: &mut Vec<(u32, u32)>,
) -> Option<BestSplit> {
    let total = neg + pos;
    let parent = (neg * neg + pos * pos) / total;
    let min_gain = 1e-10 * total;
    let mut best: Option<BestSplit> = None;

    for &f in candidates {
        let ranks = &data.rank[f * data.n..(f + 1) * data.n];
        scratch.clear();
        scratch.extend(samples.iter().map(|&i| (ranks[i as usize], i)));
        scratch.sort_unstable_by_key(|&(r, _)| r);

        let (mut ln, mut lp) = (0.0, 0.0);
        let mut k = 0;
        while k < scratch.len() {
            let r = scratch[k].0;
            while k < scratch.len() && scratch[k].0 == r {
                let i = scratch[k].1 as usize;
                let w = f64::from(weights[i]);
                if data.labels[i] {
                    lp += w;
                } else {
                    ln += w;
                }
                k += 1;
            }
            if k == scratch.len() {
                break;
            }
            let lt = ln + lp;
            let (rn, rp) = (neg - ln, pos - lp);
            let rt = rn + rp;
            if lt < min_leaf || rt < min_leaf {
                continue;
            }
            let score = (ln * ln + lp * lp) / lt + (rn * rn + rp * rp) / rt;
            let gain = score - parent;
            if gain > min_gain && best.as_ref().is_none_or(|b| gain > b.gain) {
                let lo = data.distinct[f][r as usize];
                let hi = data.distinct[f][scratch[k].0 as usize];
                let mid = 0.5 * (lo + hi);
                best = Some(BestSplit {
                    feature: f,
                    threshold: if mid < hi { mid } else { lo },
                    cut_rank: r,
                    gain,
                });
            }
        }
    }
    best
}
