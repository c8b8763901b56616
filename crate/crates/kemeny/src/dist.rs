//! Reference distributions and descriptive statistics.
//!
//! The test layer consults the standard normal and Student t CDFs; the
//! Monte Carlo layer adds Kolmogorov-Smirnov fit checks against both.
//! The Beta-Binomial with trials = n^2 - n and both shape parameters
//! equal to n is the closed-form surrogate for the null distance law,
//! exact in the tails it is used for only asymptotically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{erfc, kolmogorov_survival, ln_beta, ln_gamma, regularized_incomplete_beta};

/// Standard normal CDF. Exactly 0.5 at zero; absolute error well below
/// 1e-14 elsewhere.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Student t CDF with (possibly fractional) df > 0, via the
/// regularised incomplete beta. Exactly 0.5 at zero.
pub fn student_t_cdf(t: f64, df: f64) -> Result<f64> {
    if df <= 0.0 || !df.is_finite() {
        return Err(Error::Domain(format!(
            "student_t_cdf needs df > 0, got {df}"
        )));
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    if t.is_nan() {
        return Err(Error::Domain("student_t_cdf got NaN statistic".into()));
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let x = df / (df + t * t);
    let half_tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
    Ok(if t > 0.0 { 1.0 - half_tail } else { half_tail })
}

/// Beta-Binomial distribution on {0, ..., trials}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaBinomial {
    pub trials: u64,
    pub alpha: f64,
    pub beta: f64,
}

impl BetaBinomial {
    pub fn new(trials: u64, alpha: f64, beta: f64) -> Result<Self> {
        if alpha <= 0.0 || beta <= 0.0 || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Domain(format!(
                "beta-binomial needs positive finite shapes, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(BetaBinomial {
            trials,
            alpha,
            beta,
        })
    }

    /// Surrogate null law for the distance between two independent
    /// samples of length n: trials = n^2 - n, alpha = beta = n.
    pub fn distance_null(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooShort { len: n, min: 2 });
        }
        let trials = (n * n - n) as u64;
        Self::new(trials, n as f64, n as f64)
    }

    /// Probability mass at k, computed in log space so that large trial
    /// counts stay accurate.
    pub fn pmf(&self, k: u64) -> f64 {
        if k > self.trials {
            return 0.0;
        }
        let n = self.trials as f64;
        let kf = k as f64;
        let ln_choose = ln_gamma(n + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(n - kf + 1.0);
        let ln_mass = ln_choose + ln_beta(kf + self.alpha, n - kf + self.beta)
            - ln_beta(self.alpha, self.beta);
        ln_mass.exp()
    }

    /// P(K <= k) by direct summation of the mass function.
    pub fn cdf(&self, k: u64) -> f64 {
        let upto = k.min(self.trials);
        let total: f64 = (0..=upto).map(|j| self.pmf(j)).sum();
        total.min(1.0)
    }

    pub fn mean(&self) -> f64 {
        self.trials as f64 * self.alpha / (self.alpha + self.beta)
    }
}

/// One-sample Kolmogorov-Smirnov statistic against a reference CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    if let Some(index) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::NanInput { index });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN checked above"));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &v) in sorted.iter().enumerate() {
        let f = cdf(v);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    Ok(d)
}

/// Asymptotic two-sided KS p-value for a statistic d at sample size n.
pub fn ks_pvalue(d: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Domain(format!(
            "KS statistic must lie in [0, 1], got {d}"
        )));
    }
    if n == 0 {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    Ok(kolmogorov_survival((n as f64).sqrt() * d))
}

/// Descriptive statistics for a stream of replicate values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Standard deviation on the n - 1 denominator.
    pub sd: f64,
    pub median: f64,
    /// Median absolute deviation scaled by 1.4826, the factor that makes
    /// it consistent for the normal sd.
    pub mad: f64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    /// Third standardised central moment (moments on the n denominator).
    pub skewness: f64,
    /// Excess kurtosis: fourth standardised moment minus three.
    pub kurtosis: f64,
    /// Set when the values carry no spread (constant or singleton).
    pub degenerate: bool,
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Interpolating sample quantile on a sorted slice (the h = (n-1)p
/// convention), p clamped to [0, 1] by the caller contract.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "quantile level must lie in [0, 1], got {p}"
        )));
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < sorted.len() {
        Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
    } else {
        Ok(sorted[sorted.len() - 1])
    }
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    if let Some(index) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::NanInput { index });
    }
    let n = values.len();
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;

    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let sum_sq = m2;
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    let degenerate = n == 1 || m2 == 0.0;
    let sd = if n > 1 {
        (sum_sq / (nf - 1.0)).sqrt()
    } else {
        0.0
    };
    let (skewness, kurtosis) = if degenerate {
        (0.0, 0.0)
    } else {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    };

    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN checked above"));
    let median = median_of_sorted(&sorted);
    let mut abs_dev: Vec<f64> = values.iter().map(|v| (v - median).abs()).collect();
    abs_dev.sort_by(|a, b| a.partial_cmp(b).expect("NaN checked above"));
    let mad = 1.4826 * median_of_sorted(&abs_dev);

    let min = sorted[0];
    let max = sorted[n - 1];
    Ok(SummaryStats {
        n,
        mean,
        sd,
        median,
        mad,
        min,
        max,
        range: max - min,
        skewness,
        kurtosis,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_is_exact_at_zero() {
        assert_eq!(normal_cdf(0.0), 0.5);
    }

    #[test]
    fn normal_cdf_matches_tabulated_values() {
        let cases = [
            (1.0, 0.8413447460685429),
            (2.0, 0.9772498680518208),
            (-3.0, 0.0013498980316300933),
            (1.959963984540054, 0.975),
        ];
        for (z, want) in cases {
            assert!((normal_cdf(z) - want).abs() < 1e-13, "Phi({z})");
        }
    }

    #[test]
    fn normal_cdf_symmetry() {
        for &z in &[0.3, 1.1, 2.7, 4.4] {
            let s = normal_cdf(z) + normal_cdf(-z);
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn t_cdf_exact_points() {
        assert_eq!(student_t_cdf(0.0, 7.0).unwrap(), 0.5);
        // df = 1 is Cauchy: F(1) = 3/4
        assert!((student_t_cdf(1.0, 1.0).unwrap() - 0.75).abs() < 1e-14);
        // df = 2 has closed form 1/2 + t / (2 sqrt(t^2 + 2))
        let want = 0.5 + 2.0 / (2.0 * 6.0f64.sqrt());
        assert!((student_t_cdf(2.0, 2.0).unwrap() - want).abs() < 1e-14);
        assert!((student_t_cdf(-2.0, 2.0).unwrap() - (1.0 - want)).abs() < 1e-14);
    }

    #[test]
    fn t_cdf_rejects_bad_df() {
        assert!(student_t_cdf(1.0, 0.0).is_err());
        assert!(student_t_cdf(1.0, -3.0).is_err());
        assert!(student_t_cdf(1.0, f64::NAN).is_err());
    }

    #[test]
    fn t_cdf_is_monotone_in_t() {
        let mut prev = 0.0;
        for i in -40..=40 {
            let t = i as f64 * 0.25;
            let p = student_t_cdf(t, 4.5).unwrap();
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn beta_binomial_mass_sums_to_one() {
        let bb = BetaBinomial::new(40, 4.0, 4.0).unwrap();
        let total: f64 = (0..=40).map(|k| bb.pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-13);
        assert!((bb.cdf(40) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn beta_binomial_symmetric_when_shapes_match() {
        let bb = BetaBinomial::distance_null(5).unwrap();
        assert_eq!(bb.trials, 20);
        for k in 0..=20 {
            assert!((bb.pmf(k) - bb.pmf(20 - k)).abs() < 1e-15);
        }
        assert!((bb.mean() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn beta_binomial_rejects_bad_shapes() {
        assert!(BetaBinomial::new(10, 0.0, 1.0).is_err());
        assert!(BetaBinomial::new(10, 1.0, -2.0).is_err());
    }

    #[test]
    fn ks_statistic_against_uniform() {
        // single observation at 0.5 under U(0,1): D = 0.5 on both sides
        let d = ks_statistic(&[0.5], |x| x).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        // a perfect uniform grid keeps D at 1/(2n)
        let grid: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let d = ks_statistic(&grid, |x| x).unwrap();
        assert!((d - 0.05).abs() < 1e-15);
    }

    #[test]
    fn ks_pvalue_bounds_and_monotonicity() {
        assert_eq!(ks_pvalue(0.0, 50).unwrap(), 1.0);
        let p_small = ks_pvalue(0.01, 100).unwrap();
        let p_large = ks_pvalue(0.3, 100).unwrap();
        assert!(p_small > p_large);
        assert!((0.0..=1.0).contains(&p_small));
        assert!(ks_pvalue(1.5, 10).is_err());
    }

    #[test]
    fn summarize_hand_checked_fixture() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0, 10.0]).unwrap();
        assert_eq!(s.n, 5);
        assert!((s.mean - 4.0).abs() < 1e-15);
        assert!((s.sd - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.median, 3.0);
        assert!((s.mad - 1.4826).abs() < 1e-15);
        assert_eq!(s.min, 1.0);
        assert_eq!(s.max, 10.0);
        assert_eq!(s.range, 9.0);
        // central moments: m2 = 10, m3 = 36, m4 = 278.8
        assert!((s.skewness - 36.0 / 10.0f64.powf(1.5)).abs() < 1e-14);
        assert!((s.kurtosis - (278.8 / 100.0 - 3.0)).abs() < 1e-14);
        assert!(!s.degenerate);
    }

    #[test]
    fn summarize_degenerate_inputs() {
        let s = summarize(&[2.0, 2.0, 2.0]).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.sd, 0.0);
        assert_eq!(s.skewness, 0.0);
        assert_eq!(s.kurtosis, 0.0);

        let one = summarize(&[7.0]).unwrap();
        assert!(one.degenerate);
        assert_eq!(one.mean, 7.0);
        assert_eq!(one.sd, 0.0);

        assert!(matches!(summarize(&[]), Err(Error::TooShort { .. })));
        assert!(matches!(
            summarize(&[1.0, f64::NAN]),
            Err(Error::NanInput { index: 1 })
        ));
    }

    #[test]
    fn quantiles_interpolate() {
        let sorted = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&sorted, 0.0).unwrap(), 1.0);
        assert_eq!(quantile_sorted(&sorted, 1.0).unwrap(), 4.0);
        assert!((quantile_sorted(&sorted, 0.5).unwrap() - 2.5).abs() < 1e-15);
        assert!((quantile_sorted(&sorted, 0.25).unwrap() - 1.75).abs() < 1e-15);
        assert!(quantile_sorted(&sorted, 1.5).is_err());
    }
}
