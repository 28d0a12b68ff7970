use rand::seq::SliceRandom;

use super::{Dataset, TargetKind};
use crate::error::{Error, Result};
use crate::seed;

/// Disjoint train/validation index sets covering `0..N`, each sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Random train/validation split with `round(fraction * N)` validation rows.
///
/// Binary targets are stratified: the validation quota is shared between the
/// classes by largest remainder, and every class with at least two members
/// lands on both sides.
pub fn split(d: &Dataset, validation_fraction: f64, seed: u64) -> Result<SplitIndices> {
    if !(validation_fraction > 0.0 && validation_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "validation fraction must lie in (0, 1), got {validation_fraction}"
        )));
    }
    let n = d.n_samples();
    let n_val = (validation_fraction * n as f64).round() as usize;
    if n_val == 0 || n_val >= n {
        return Err(Error::invalid(format!(
            "validation fraction {validation_fraction} leaves an empty side for {n} samples"
        )));
    }

    let groups: Vec<Vec<usize>> = match d.target().kind() {
        TargetKind::Binary => {
            let labels = d.target().labels();
            let neg = (0..n).filter(|&i| !labels[i]).collect();
            let pos = (0..n).filter(|&i| labels[i]).collect();
            vec![neg, pos]
        }
        TargetKind::Continuous => vec![(0..n).collect()],
    };
    let quotas = allocate(&groups.iter().map(Vec::len).collect::<Vec<_>>(), n_val);

    let mut rng = seed::rng(seed, "split", 0);
    let mut train = Vec::with_capacity(n - n_val);
    let mut validation = Vec::with_capacity(n_val);
    for (mut group, quota) in groups.into_iter().zip(quotas) {
        group.shuffle(&mut rng);
        validation.extend_from_slice(&group[..quota]);
        train.extend_from_slice(&group[quota..]);
    }
    train.sort_unstable();
    validation.sort_unstable();
    Ok(SplitIndices { train, validation })
}

/// Split `total` across groups proportionally (largest remainder, ties to the
/// earlier group), then move single units so that any group with two or more
/// members is represented on both sides.
fn allocate(sizes: &[usize], total: usize) -> Vec<usize> {
    let n: usize = sizes.iter().sum();
    let exact: Vec<f64> = sizes
        .iter()
        .map(|&s| total as f64 * s as f64 / n as f64)
        .collect();
    let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut left = total - quota.iter().sum::<usize>();
    for &g in order.iter().cycle() {
        if left == 0 {
            break;
        }
        if quota[g] < sizes[g] {
            quota[g] += 1;
            left -= 1;
        }
    }

    for g in 0..sizes.len() {
        if sizes[g] < 2 {
            continue;
        }
        if quota[g] == 0 {
            if let Some(donor) = (0..sizes.len())
                .filter(|&h| h != g && quota[h] > 1)
                .max_by_key(|&h| (quota[h], std::cmp::Reverse(h)))
            {
                quota[donor] -= 1;
                quota[g] += 1;
            }
        } else if quota[g] == sizes[g] {
            if let Some(taker) = (0..sizes.len())
                .filter(|&h| h != g && quota[h] + 1 < sizes[h])
                .min_by_key(|&h| (quota[h], h))
            {
                quota[g] -= 1;
                quota[taker] += 1;
            }
        }
    }
    quota
}
