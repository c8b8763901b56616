//! Pairwise-order kernels.
//!
//! Everything here reduces to integer pair counts over the n(n-1)/2
//! unordered index pairs of a sample: concordant, discordant, tied in
//! one margin, tied in both. The distance between two samples charges
//! each pair by how far its order relations disagree,
//! |sign(x_k - x_l) - sign(y_k - y_l)|: nothing when the relation
//! matches (including tied in both), one when a tie faces a strict
//! order, two when the strict orders oppose. Summed over pairs that is
//! the integer
//!
//!   d(X, Y) = T_x + T_y - 2 * T_xy + 2 * D
//!
//! where D is the discordant-pair count and T_* are tied-pair counts.
//! This is the metric form: d(x, x) = 0 also under ties, and the
//! triangle inequality holds pair by pair. A merge-sort route computes
//! the counts in O(n log n); a dense O(n^2) route recomputes the
//! distance by direct summation. Both are exact integer arithmetic,
//! so they must agree bit for bit.

use crate::error::{Error, Result};
use crate::sample::Sample;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Number of unordered index pairs.
pub(crate) fn unordered_pairs(n: usize) -> u64 {
    let n = n as u64;
    n * (n - 1) / 2
}

fn check_paired(x: &Sample, y: &Sample) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

fn sign(a: f64, b: f64) -> i64 {
    if a > b {
        1
    } else if a < b {
        -1
    } else {
        0
    }
}

/// Exact pair counts for a paired sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub n: usize,
    /// Pairs ordered oppositely in the two samples.
    pub discordant: u64,
    /// Pairs tied in the first sample (including pairs tied in both).
    pub tied_x: u64,
    /// Pairs tied in the second sample (including pairs tied in both).
    pub tied_y: u64,
    /// Pairs tied in both samples.
    pub tied_both: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        unordered_pairs(self.n)
    }

    /// Concordant minus discordant pairs, the signed agreement count.
    pub fn net_agreement(&self) -> i64 {
        let untied =
            self.total() as i64 - self.tied_x as i64 - self.tied_y as i64 + self.tied_both as i64;
        untied - 2 * self.discordant as i64
    }

    /// The integer Kemeny distance between the two samples.
    pub fn distance(&self) -> u64 {
        self.tied_x + self.tied_y - 2 * self.tied_both + 2 * self.discordant
    }
}

/// Counts inversions under strict `>` while merge-sorting `vals`.
/// Equal neighbours are kept stable and contribute nothing.
fn sort_counting_inversions(vals: &mut [f64]) -> u64 {
    let n = vals.len();
    let mut buf = vals.to_vec();
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo + width < n {
            let mid = lo + width;
            let hi = usize::min(lo + 2 * width, n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if vals[j] < vals[i] {
                    inversions += (mid - i) as u64;
                    buf[k] = vals[j];
                    j += 1;
                } else {
                    buf[k] = vals[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&vals[i..mid]);
            buf[k + (mid - i)..hi].copy_from_slice(&vals[j..hi]);
            vals[lo..hi].copy_from_slice(&buf[lo..hi]);
            lo = hi;
        }
        width *= 2;
    }
    inversions
}

fn tied_run_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut pairs = 0u64;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let run = (end - start) as u64;
        pairs += run * (run - 1) / 2;
        start = end;
    }
    pairs
}

/// Merge-sort route: O(n log n) exact pair counts.
pub fn pair_counts(x: &Sample, y: &Sample) -> Result<PairCounts> {
    check_paired(x, y)?;
    let n = x.len();
    let xv = x.values();
    let yv = y.values();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (xv[a], yv[a])
            .partial_cmp(&(xv[b], yv[b]))
            .expect("NaN is rejected at construction")
    });

    let joint: Vec<(f64, f64)> = order.iter().map(|&i| (xv[i], yv[i])).collect();
    let tied_x = tied_run_pairs(&joint.iter().map(|&(a, _)| a).collect::<Vec<_>>());
    let tied_both = tied_run_pairs(&joint);

    // With x ascending and y ascending within x-ties, every y-inversion
    // under strict `>` comes from a pair that is strictly ordered in x
    // and oppositely ordered in y: exactly the discordant pairs.
    let mut ys: Vec<f64> = joint.iter().map(|&(_, b)| b).collect();
    let discordant = sort_counting_inversions(&mut ys);
    let tied_y = tied_run_pairs(&ys);

    Ok(PairCounts {
        n,
        discordant,
        tied_x,
        tied_y,
        tied_both,
    })
}

/// Integer Kemeny distance via the merge-sort route.
pub fn kemeny_distance(x: &Sample, y: &Sample) -> Result<u64> {
    Ok(pair_counts(x, y)?.distance())
}

/// Integer Kemeny distance via direct summation over all pairs.
/// Quadratic; kept as the independently-coded reference route.
pub fn kemeny_distance_dense(x: &Sample, y: &Sample) -> Result<u64> {
    check_paired(x, y)?;
    let xv = x.values();
    let yv = y.values();
    let n = xv.len();
    let mut distance = 0u64;
    for k in 0..n {
        for l in k + 1..n {
            distance += (sign(xv[k], xv[l]) - sign(yv[k], yv[l])).unsigned_abs();
        }
    }
    Ok(distance)
}

/// Fraction of pairs not tied: the per-sample concentration. Lands in
/// [0, 1], zero exactly for constant samples, one when tie-free.
pub fn kemeny_variance(x: &Sample) -> f64 {
    let order = x.ascending_order();
    let sorted: Vec<f64> = order.iter().map(|&i| x.values()[i]).collect();
    let tied = tied_run_pairs(&sorted);
    let total = unordered_pairs(x.len());
    (total - tied) as f64 / total as f64
}

/// Signed pair agreement scaled to [-1, 1]: the tau-style correlation
/// numerator shared by the two-sample tests.
pub fn cross_concentration(x: &Sample, y: &Sample) -> Result<f64> {
    let counts = pair_counts(x, y)?;
    Ok(counts.net_agreement() as f64 / counts.total() as f64)
}

/// Dense matrix of pairwise scores sqrt(1/2) * sign(x_k - x_l).
/// Materialises n^2 entries, so it is meant for small n; the distance
/// and correlation routines never build it.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaScores {
    n: usize,
    entries: Vec<f64>,
}

impl KappaScores {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, k: usize, l: usize) -> f64 {
        self.entries[k * self.n + l]
    }

    /// Row sums; row k equals the centred midrank score of element k.
    pub fn row_sums(&self) -> Vec<f64> {
        self.entries
            .chunks(self.n)
            .map(|row| row.iter().sum())
            .collect()
    }
}

pub fn kappa_scores(x: &Sample) -> KappaScores {
    let n = x.len();
    let xv = x.values();
    let mut entries = vec![0.0; n * n];
    for k in 0..n {
        for l in 0..n {
            entries[k * n + l] = SQRT_HALF * sign(xv[k], xv[l]) as f64;
        }
    }
    KappaScores { n, entries }
}

/// Centred midrank scores sqrt(1/2) * (2 r_k - n - 1) with midranks r.
/// Always sums to zero; invariant under strictly increasing maps.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    entries: Vec<f64>,
}

impl RankVector {
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Root mean square on the n-1 denominator, the scale that makes
    /// tie-free vectors comparable across n.
    pub fn frobenius_sd(&self) -> f64 {
        let n = self.entries.len();
        let sum_sq: f64 = self.entries.iter().map(|e| e * e).sum();
        (sum_sq / (n - 1) as f64).sqrt()
    }
}

pub fn rank_vector(x: &Sample) -> RankVector {
    let n = x.len() as f64;
    let entries = x
        .midranks()
        .iter()
        .map(|&r| SQRT_HALF * (2.0 * r - n - 1.0))
        .collect();
    RankVector { entries }
}

pub fn frobenius_sd(x: &Sample) -> f64 {
    rank_vector(x).frobenius_sd()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(values: &[f64]) -> Sample {
        Sample::new(values.to_vec()).unwrap()
    }

    #[test]
    fn distance_of_identical_samples_is_zero() {
        let x = s(&[3.0, 1.0, 2.0, 2.0]);
        assert_eq!(kemeny_distance(&x, &x).unwrap(), 0);
    }

    #[test]
    fn distance_of_reversal_is_maximal() {
        let x = s(&[1.0, 2.0, 3.0]);
        let y = s(&[3.0, 2.0, 1.0]);
        // n^2 - n = 6 for n = 3
        assert_eq!(kemeny_distance(&x, &y).unwrap(), 6);
    }

    #[test]
    fn single_tie_costs_one() {
        let x = s(&[1.0, 2.0, 3.0]);
        let y = s(&[1.0, 1.0, 2.0]);
        assert_eq!(kemeny_distance(&x, &y).unwrap(), 1);
        assert_eq!(kemeny_distance(&y, &x).unwrap(), 1);
    }

    #[test]
    fn routes_agree_on_tied_data() {
        let x = s(&[2.0, 2.0, 1.0, 4.0, 4.0, 4.0, 0.5]);
        let y = s(&[9.0, 3.0, 3.0, 3.0, 7.0, 1.0, 1.0]);
        assert_eq!(
            kemeny_distance(&x, &y).unwrap(),
            kemeny_distance_dense(&x, &y).unwrap()
        );
    }

    #[test]
    fn length_mismatch_is_reported() {
        let x = s(&[1.0, 2.0]);
        let y = s(&[1.0, 2.0, 3.0]);
        assert_eq!(
            kemeny_distance(&x, &y).unwrap_err(),
            Error::LengthMismatch { left: 2, right: 3 }
        );
    }

    #[test]
    fn variance_is_tie_fraction_complement() {
        assert_eq!(kemeny_variance(&s(&[1.0, 2.0, 3.0])), 1.0);
        assert_eq!(kemeny_variance(&s(&[5.0, 5.0, 5.0])), 0.0);
        // one tied pair out of three
        assert!((kemeny_variance(&s(&[1.0, 1.0, 2.0])) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cross_concentration_matches_hand_count() {
        let x = s(&[1.0, 2.0, 3.0]);
        let y = s(&[1.0, 1.0, 2.0]);
        // two concordant pairs, one tied in y, out of three
        assert!((cross_concentration(&x, &y).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn kappa_scores_are_antisymmetric_with_zero_diagonal() {
        let x = s(&[2.0, 1.0, 2.0]);
        let scores = kappa_scores(&x);
        for k in 0..3 {
            assert_eq!(scores.entry(k, k), 0.0);
            for l in 0..3 {
                assert_eq!(scores.entry(k, l), -scores.entry(l, k));
            }
        }
        assert_eq!(scores.entry(0, 1), SQRT_HALF);
        assert_eq!(scores.entry(0, 2), 0.0);
    }

    #[test]
    fn rank_vector_matches_row_sum_route() {
        let x = s(&[4.0, 1.0, 4.0, 2.0, 2.0, 9.0]);
        let direct = rank_vector(&x);
        let via_rows = kappa_scores(&x).row_sums();
        for (a, b) in direct.entries().iter().zip(via_rows.iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn rank_vector_sums_to_zero() {
        let x = s(&[3.0, 3.0, 1.0, 7.0, 5.0, 5.0, 5.0]);
        let total: f64 = rank_vector(&x).entries().iter().sum();
        assert!(total.abs() < 1e-9);
    }

    #[test]
    fn rank_vector_on_tied_triple() {
        let x = s(&[1.0, 1.0, 2.0]);
        // midranks 1.5, 1.5, 3 -> sqrt(1/2) * (-1, -1, 2)
        let v = rank_vector(&x);
        assert!((v.entries()[0] - -SQRT_HALF).abs() < 1e-15);
        assert!((v.entries()[1] - -SQRT_HALF).abs() < 1e-15);
        assert!((v.entries()[2] - 2.0 * SQRT_HALF).abs() < 1e-15);
    }

    #[test]
    fn inversion_counter_handles_ties_and_runs() {
        let mut vals = vec![2.0, 2.0, 1.0];
        assert_eq!(sort_counting_inversions(&mut vals), 2);
        assert_eq!(vals, vec![1.0, 2.0, 2.0]);

        let mut vals = vec![1.0, 1.0, 1.0];
        assert_eq!(sort_counting_inversions(&mut vals), 0);

        let mut vals: Vec<f64> = (0..64).rev().map(f64::from).collect();
        assert_eq!(sort_counting_inversions(&mut vals), 64 * 63 / 2);
    }
}
