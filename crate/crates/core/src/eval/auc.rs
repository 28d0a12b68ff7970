use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucResult {
    pub value: f64,
    pub positives: usize,
    pub negatives: usize,
}

/// Area under the ROC curve via the Mann-Whitney statistic with midranks,
/// so tied (positive, negative) pairs count one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<AucResult> {
    if scores.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("NaN score"));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::invalid("auc needs both labels"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the rank sum of the positives keeps midranks integral.
    let mut rank2_sum: u128 = 0;
    let mut k = 0;
    while k < order.len() {
        let mut end = k;
        while end + 1 < order.len() && scores[order[end + 1]] == scores[order[k]] {
            end += 1;
        }
        // Ranks k+1..=end+1 share the midrank (k + end + 2) / 2.
        let mid2 = (k + end + 2) as u128;
        let pos_in_group = order[k..=end].iter().filter(|&&i| labels[i]).count() as u128;
        rank2_sum += mid2 * pos_in_group;
        k = end + 1;
    }
    let n1 = positives as u128;
    let u2 = rank2_sum - n1 * (n1 + 1);
    let value = u2 as f64 / (2.0 * positives as f64 * negatives as f64);
    Ok(AucResult {
        value,
        positives,
        negatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let r = auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!((r.positives, r.negatives), (2, 2));
    }

    #[test]
    fn all_tied_is_half() {
        let r = auc(&[0.3; 5], &[true, false, false, true, false]).unwrap();
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn single_label_rejected() {
        assert!(auc(&[0.1, 0.2], &[true, true]).is_err());
        assert!(auc(&[0.1], &[true, false]).is_err());
    }
}
