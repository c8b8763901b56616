//! Bundled example data.
//!
//! The classic paired sleep study: extra hours of sleep under two
//! soporifics for ten patients, laid out as 20 observations with a
//! two-level group column. The group margin is heavily tied (two
//! blocks of ten), which is exactly the regime the tie-aware
//! estimators are for.

use crate::error::Result;
use crate::sample::Sample;

pub const SLEEP_EXTRA: [f64; 20] = [
    0.7, -1.6, -0.2, -1.2, -0.1, 3.4, 3.7, 0.8, 0.0, 2.0, 1.9, 0.8, 1.1, 0.1, -0.1, 4.4, 5.5, 1.6,
    4.6, 3.4,
];

pub const SLEEP_GROUP: [f64; 20] = [
    1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0,
    2.0,
];

/// The (extra, group) pair as validated samples.
pub fn sleep() -> Result<(Sample, Sample)> {
    Ok((
        Sample::new(SLEEP_EXTRA.to_vec())?,
        Sample::new(SLEEP_GROUP.to_vec())?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{frobenius_sd, kemeny_distance, kemeny_variance};

    #[test]
    fn sleep_checksums() {
        let (extra, group) = sleep().unwrap();
        assert_eq!(extra.len(), 20);
        assert_eq!(group.len(), 20);
        // frozen fingerprints of the two columns
        assert!((frobenius_sd(&extra) - 8.357158922932953).abs() < 1e-12);
        assert!((frobenius_sd(&group) - 7.254762501100117).abs() < 1e-12);
        assert_eq!(kemeny_distance(&extra, &group).unwrap(), 141);
        // extra has three tied pairs (two -0.1, two 0.8, two 3.4)
        assert!((kemeny_variance(&extra) - 374.0 / 380.0).abs() < 1e-15);
        // group is two blocks of ten: 90 tied pairs in 190
        assert!((kemeny_variance(&group) - 200.0 / 380.0).abs() < 1e-15);
    }
}
