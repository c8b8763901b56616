use crate::error::{Error, Result};

/// A validated univariate sample.
///
/// Observations live on the extended real line: +/-infinity is accepted
/// (rank statistics only consult order), NaN is rejected because it has
/// no place in a total preorder. Ties are expected and preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    constant: bool,
}

impl Sample {
    /// Validates and wraps raw observations.
    ///
    /// Fails on fewer than two observations or on any NaN entry.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort {
                len: values.len(),
                min: 2,
            });
        }
        if let Some(index) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::NanInput { index });
        }
        let constant = values.iter().all(|&v| v == values[0]);
        Ok(Sample { values, constant })
    }

    /// Builds a sample from integer labels, as drawn by the label-space
    /// generators. Labels are small and never NaN, so this cannot fail
    /// once the length is at least two.
    pub fn from_labels(labels: &[u32]) -> Result<Self> {
        Self::new(labels.iter().map(|&l| f64::from(l)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every observation equals the first one. Constant samples
    /// are valid inputs for distances but degenerate for correlations.
    pub fn is_constant(&self) -> bool {
        self.constant
    }

    /// Indices of the observations in ascending value order. Ties keep
    /// their original relative order; callers group equal runs themselves.
    pub(crate) fn ascending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| {
            self.values[a]
                .partial_cmp(&self.values[b])
                .expect("NaN is rejected at construction")
        });
        order
    }

    /// Midranks on the 1..=n scale: tied observations share the average
    /// of the positions they occupy.
    pub fn midranks(&self) -> Vec<f64> {
        let n = self.values.len();
        let order = self.ascending_order();
        let mut ranks = vec![0.0; n];
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && self.values[order[end]] == self.values[order[start]] {
                end += 1;
            }
            // positions start+1 ..= end, averaged
            let midrank = (start + 1 + end) as f64 / 2.0;
            for &idx in &order[start..end] {
                ranks[idx] = midrank;
            }
            start = end;
        }
        ranks
    }
}
