use crate::error::{Error, Result};

/// A feature mapped to equal-frequency bins.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedColumn {
    /// Upper bin boundaries (inclusive), ascending; `edges.len() + 1` bins.
    pub edges: Vec<f64>,
    /// Bin code per sample.
    pub codes: Vec<u32>,
    pub counts: Vec<usize>,
    /// Fewer than two occupied bins.
    pub degenerate: bool,
}

impl DiscretizedColumn {
    /// Two-bin column straight from binary labels.
    pub fn from_labels(labels: &[bool]) -> Self {
        let codes: Vec<u32> = labels.iter().map(|&b| u32::from(b)).collect();
        let pos = labels.iter().filter(|&&b| b).count();
        let counts = vec![labels.len() - pos, pos];
        Self {
            edges: vec![0.5],
            degenerate: pos == 0 || pos == labels.len(),
            codes,
            counts,
        }
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// Equal-frequency binning into at most `bins` bins.
///
/// Cut `b` sits after the `floor(b * N / bins)`-th order statistic; repeated
/// cut values are merged and a sample equal to a cut goes to the lower bin.
pub fn discretize(x: &[f64], bins: usize) -> Result<DiscretizedColumn> {
    if bins < 2 {
        return Err(Error::invalid(format!("need at least 2 bins, got {bins}")));
    }
    if x.is_empty() {
        return Err(Error::invalid("cannot discretize an empty column"));
    }
    let n = x.len();
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let max = sorted[n - 1];
    let mut edges: Vec<f64> = Vec::with_capacity(bins - 1);
    for b in 1..bins {
        let k = b * n / bins;
        if k == 0 {
            continue;
        }
        let e = sorted[k - 1];
        if e < max && edges.last().is_none_or(|&last| e > last) {
            edges.push(e);
        }
    }
    let mut counts = vec![0usize; edges.len() + 1];
    let codes: Vec<u32> = x
        .iter()
        .map(|&v| {
            let c = edges.partition_point(|&e| e < v);
            counts[c] += 1;
            c as u32
        })
        .collect();
    Ok(DiscretizedColumn {
        degenerate: counts.len() < 2,
        edges,
        codes,
        counts,
    })
}

/// Joint counts of two discretized columns, row-major over `x` bins.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    pub rows: usize,
    pub cols: usize,
    pub counts: Vec<u64>,
}

impl ContingencyTable {
    pub fn new(rows: usize, cols: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != rows * cols {
            return Err(Error::invalid("contingency table has the wrong number of cells"));
        }
        Ok(Self { rows, cols, counts })
    }

    pub fn from_columns(x: &DiscretizedColumn, y: &DiscretizedColumn) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::invalid("discretized columns differ in length"));
        }
        let (rows, cols) = (x.n_bins(), y.n_bins());
        let mut counts = vec![0u64; rows * cols];
        for (&a, &b) in x.codes.iter().zip(&y.codes) {
            counts[a as usize * cols + b as usize] += 1;
        }
        Ok(Self { rows, cols, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.counts.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.counts[r * self.cols + c]).sum())
            .collect()
    }
}

/// Shannon entropy in bits of a count vector.
pub fn entropy_bits(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Entropies (bits), information gain and symmetrical uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub h_x: f64,
    pub h_y: f64,
    pub ig: f64,
    pub su: f64,
}

impl EntropyReport {
    pub fn from_table(t: &ContingencyTable) -> Self {
        let h_x = entropy_bits(&t.row_totals());
        let h_y = entropy_bits(&t.col_totals());
        let h_xy = entropy_bits(&t.counts);
        let ig = (h_x + h_y - h_xy).max(0.0);
        let denom = h_x + h_y;
        let su = if denom > 0.0 {
            (2.0 * ig / denom).clamp(0.0, 1.0)
        } else {
            0.0
        };
        Self { h_x, h_y, ig, su }
    }
}

/// `SU = 2 IG / (H(X) + H(Y))` with `IG = H(X) + H(Y) - H(X, Y)`.
pub fn symmetrical_uncertainty(x: &DiscretizedColumn, y: &DiscretizedColumn) -> Result<EntropyReport> {
    Ok(EntropyReport::from_table(&ContingencyTable::from_columns(x, y)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hundred_values_ten_bins() {
        let x: Vec<f64> = (0..100).map(|i| (i * 37 % 100) as f64).collect();
        let d = discretize(&x, 10).unwrap();
        assert_eq!(d.counts, vec![10; 10]);
        assert!(!d.degenerate);
    }

    #[test]
    fn constant_column_is_degenerate() {
        let d = discretize(&[4.0; 20], 10).unwrap();
        assert_eq!(d.n_bins(), 1);
        assert!(d.degenerate);
        assert!(discretize(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn heavy_ties_merge_edges() {
        let mut x = vec![0.0; 50];
        x.extend((0..50).map(f64::from));
        let d = discretize(&x, 10).unwrap();
        assert_eq!(d.counts.iter().sum::<usize>(), 100);
        // 51 zeros share one bin.
        assert_eq!(d.counts[0], 51);
    }

    #[test]
    fn identical_binary_gives_su_one() {
        let labels = [true, false, false, true, true, false, false, false];
        let y = DiscretizedColumn::from_labels(&labels);
        let r = symmetrical_uncertainty(&y, &y).unwrap();
        assert!((r.su - 1.0).abs() < 1e-12);
        assert!((r.ig - r.h_x).abs() < 1e-12);
    }

    #[test]
    fn product_table_is_independent() {
        let rows = [3u64, 1, 2];
        let cols = [2u64, 5];
        let counts = rows.iter().flat_map(|r| cols.iter().map(move |c| r * c)).collect();
        let t = ContingencyTable::new(3, 2, counts).unwrap();
        let r = EntropyReport::from_table(&t);
        assert!(r.ig.abs() < 1e-12);
        assert!(r.su.abs() < 1e-12);
    }

    #[test]
    fn degenerate_column_has_zero_su() {
        let x = discretize(&[1.0; 6], 10).unwrap();
        let y = DiscretizedColumn::from_labels(&[true, false, true, false, true, false]);
        assert_eq!(symmetrical_uncertainty(&x, &y).unwrap().su, 0.0);
    }
}
