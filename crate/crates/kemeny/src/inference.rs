//! Studentised tests built on the distance kernel.
//!
//! The Wald-type tau tests standardise the integer distance d by
//! s = sqrt(V_n / s_p^2), where V_n is the closed-form null variance of
//! the distance over the label population and s_p^2 is a pooled
//! concentration estimated from the data. Two pooling variants are
//! supported; they share V_n and differ only in the pooling denominator
//! and in the reference distribution:
//!
//! * `ExampleConsistent`: s_p^2 is the raw cross concentration, the
//!   statistic is c(n) * d / s with a small-sample continuity factor
//!   c(n), and the reference is standard normal.
//! * `EquationLiteral`: s_p^2 is the cross concentration normalised by
//!   the per-margin concentrations, the statistic is -d / s, and the
//!   reference is Student t.
//!
//! The rho tests use the classical t-transform of a correlation.

use serde::Serialize;

use crate::dist::{normal_cdf, student_t_cdf};
use crate::error::{Error, Result};
use crate::estimators::{pearson_r, rho_kappa, CorrelationEstimate};
use crate::kernel::{cross_concentration, kemeny_distance, kemeny_variance};
use crate::sample::Sample;

/// Which pooled-concentration denominator a tau test uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    ExampleConsistent,
    EquationLiteral,
}

/// Pooling variant plus the small-sample continuity switch.
///
/// The continuity factor multiplies the standardised statistic, which
/// shrinks it towards zero (c(n) < 1) to damp small-sample
/// over-rejection. It defaults to on for the example-consistent
/// variant and off for the equation-literal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorrectionPolicy {
    pub variant: Variant,
    pub apply_continuity: bool,
}

impl CorrectionPolicy {
    pub fn example_consistent() -> Self {
        CorrectionPolicy {
            variant: Variant::ExampleConsistent,
            apply_continuity: true,
        }
    }

    pub fn equation_literal() -> Self {
        CorrectionPolicy {
            variant: Variant::EquationLiteral,
            apply_continuity: false,
        }
    }

    pub fn with_continuity(mut self, apply: bool) -> Self {
        self.apply_continuity = apply;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceDistribution {
    Normal,
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    TauWald,
    OneSampleTauWald,
    RhoT,
    OneSampleRhoT,
    PearsonT,
}

impl TestMethod {
    pub fn name(self) -> &'static str {
        match self {
            TestMethod::TauWald => "tau_wald",
            TestMethod::OneSampleTauWald => "one_sample_tau_wald",
            TestMethod::RhoT => "rho_t",
            TestMethod::OneSampleRhoT => "one_sample_rho_t",
            TestMethod::PearsonT => "pearson_t",
        }
    }
}

impl std::fmt::Display for TestMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a hypothesis test. `df` is absent for normal-reference
/// tests, `variant` for the rho and Pearson tests, and `correction_c`
/// is the continuity factor actually applied (1 when none was).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub method: TestMethod,
    pub estimate: f64,
    pub statistic: f64,
    pub df: Option<f64>,
    pub p_value: f64,
    pub n: usize,
    pub correction_c: f64,
    pub variant: Option<Variant>,
    pub distribution: ReferenceDistribution,
}

/// Small-sample continuity factor c(n): (7/11)^(1/2) up to n = 75,
/// (7/11)^(1/4) up to n = 749, (7/11)^(1/8) from n = 750 on.
pub fn continuity_correction(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    let base: f64 = 7.0 / 11.0;
    Ok(if n <= 75 {
        base.sqrt()
    } else if n < 750 {
        base.powf(0.25)
    } else {
        base.powf(0.125)
    })
}

/// Closed-form variance of the distance to a fixed tie-free reference
/// over the uniform label population:
/// V_n = (n-1)^2 (n+4) (2n-1) / (18n).
pub fn population_distance_variance(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    let nf = n as f64;
    Ok((nf - 1.0).powi(2) * (nf + 4.0) * (2.0 * nf - 1.0) / (18.0 * nf))
}

/// V_n scaled by a pooled concentration: the squared denominator of
/// the Wald statistics.
pub fn adjusted_population_variance(n: usize, pooled_sq: f64) -> Result<f64> {
    if pooled_sq <= 0.0 || pooled_sq.is_nan() {
        return Err(Error::Degenerate("pooled concentration is not positive"));
    }
    Ok(population_distance_variance(n)? / pooled_sq)
}

/// Two-sample pooled concentration s_p^2 for the requested variant.
pub fn pooled_concentration(x: &Sample, y: &Sample, variant: Variant) -> Result<f64> {
    let cross = cross_concentration(x, y)?;
    match variant {
        Variant::ExampleConsistent => Ok(cross),
        Variant::EquationLiteral => {
            let vx = kemeny_variance(x);
            let vy = kemeny_variance(y);
            if vx == 0.0 || vy == 0.0 {
                return Err(Error::Degenerate("constant sample has zero concentration"));
            }
            Ok(cross / (vx.sqrt() * vy.sqrt()))
        }
    }
}

/// One-sample pooled concentration against a fixed reference:
/// cross concentration over twice the sample's own concentration.
pub fn pooled_concentration_one_sample(x: &Sample, reference: &Sample) -> Result<f64> {
    let cross = cross_concentration(x, reference)?;
    let vx = kemeny_variance(x);
    if vx == 0.0 {
        return Err(Error::Degenerate("constant sample has zero concentration"));
    }
    Ok(cross / (2.0 * vx))
}

fn two_sided(cdf_value: f64) -> f64 {
    (2.0 * cdf_value.min(1.0 - cdf_value)).clamp(0.0, 1.0)
}

struct WaldParts {
    statistic: f64,
    df: Option<f64>,
    p_value: f64,
    correction_c: f64,
    distribution: ReferenceDistribution,
}

fn wald_parts(
    n: usize,
    d: u64,
    pooled_sq: f64,
    df: Option<f64>,
    policy: CorrectionPolicy,
) -> Result<WaldParts> {
    let scale = adjusted_population_variance(n, pooled_sq)?.sqrt();
    let correction_c = if policy.apply_continuity {
        continuity_correction(n)?
    } else {
        1.0
    };
    match policy.variant {
        Variant::ExampleConsistent => {
            let statistic = correction_c * d as f64 / scale;
            Ok(WaldParts {
                statistic,
                df: None,
                p_value: two_sided(normal_cdf(statistic)),
                correction_c,
                distribution: ReferenceDistribution::Normal,
            })
        }
        Variant::EquationLiteral => {
            let statistic = -correction_c * d as f64 / scale;
            let df = df.expect("literal variant always carries df");
            Ok(WaldParts {
                statistic,
                df: Some(df),
                p_value: two_sided(student_t_cdf(statistic, df)?),
                correction_c,
                distribution: ReferenceDistribution::StudentT,
            })
        }
    }
}

/// Two-sample Wald test of pair agreement. The estimate reported is
/// the pair-agreement coefficient itself.
pub fn tau_wald_test(x: &Sample, y: &Sample, policy: CorrectionPolicy) -> Result<TestResult> {
    let n = x.len();
    let d = kemeny_distance(x, y)?;
    let pooled = pooled_concentration(x, y, policy.variant)?;
    let estimate = cross_concentration(x, y)?;
    let parts = wald_parts(n, d, pooled, Some((n - 2) as f64), policy)?;
    Ok(TestResult {
        method: TestMethod::TauWald,
        estimate,
        statistic: parts.statistic,
        df: parts.df,
        p_value: parts.p_value,
        n,
        correction_c: parts.correction_c,
        variant: Some(policy.variant),
        distribution: parts.distribution,
    })
}

/// One-sample Wald test against a fixed reference ordering. Under the
/// literal variant the pooling follows the one-sample form and the
/// reference has n - 1 degrees of freedom.
pub fn one_sample_tau_test(
    x: &Sample,
    reference: &Sample,
    policy: CorrectionPolicy,
) -> Result<TestResult> {
    let n = x.len();
    let d = kemeny_distance(x, reference)?;
    let pooled = match policy.variant {
        Variant::ExampleConsistent => cross_concentration(x, reference)?,
        Variant::EquationLiteral => pooled_concentration_one_sample(x, reference)?,
    };
    let estimate = cross_concentration(x, reference)?;
    let parts = wald_parts(n, d, pooled, Some((n - 1) as f64), policy)?;
    Ok(TestResult {
        method: TestMethod::OneSampleTauWald,
        estimate,
        statistic: parts.statistic,
        df: parts.df,
        p_value: parts.p_value,
        n,
        correction_c: parts.correction_c,
        variant: Some(policy.variant),
        distribution: parts.distribution,
    })
}

/// Classical t-transform of a correlation: t = rho sqrt(df / (1 - rho^2)).
pub fn t_transform(rho: f64, df: f64) -> Result<f64> {
    if df <= 0.0 || df.is_nan() {
        return Err(Error::Domain(format!("t_transform needs df > 0, got {df}")));
    }
    if rho.abs() >= 1.0 {
        return Err(Error::Degenerate(
            "perfect correlation has no finite t statistic",
        ));
    }
    Ok(rho * (df / (1.0 - rho * rho)).sqrt())
}

fn correlation_t(method: TestMethod, est: CorrelationEstimate, df: f64) -> Result<TestResult> {
    let statistic = t_transform(est.estimate, df)?;
    let p_value = two_sided(student_t_cdf(statistic, df)?);
    Ok(TestResult {
        method,
        estimate: est.estimate,
        statistic,
        df: Some(df),
        p_value,
        n: est.n,
        correction_c: 1.0,
        variant: None,
        distribution: ReferenceDistribution::StudentT,
    })
}

/// t test of the centred-rank correlation on n - 2 degrees of freedom.
pub fn rho_t_test(x: &Sample, y: &Sample) -> Result<TestResult> {
    if x.len() < 3 {
        return Err(Error::TooShort {
            len: x.len(),
            min: 3,
        });
    }
    correlation_t(TestMethod::RhoT, rho_kappa(x, y)?, (x.len() - 2) as f64)
}

/// One-sample variant against a fixed reference, on n - 1 degrees of
/// freedom.
pub fn one_sample_rho_test(x: &Sample, reference: &Sample) -> Result<TestResult> {
    correlation_t(
        TestMethod::OneSampleRhoT,
        rho_kappa(x, reference)?,
        (x.len() - 1) as f64,
    )
}

/// t test of the Pearson correlation on n - 2 degrees of freedom.
pub fn pearson_t_test(x: &Sample, y: &Sample) -> Result<TestResult> {
    if x.len() < 3 {
        return Err(Error::TooShort {
            len: x.len(),
            min: 3,
        });
    }
    correlation_t(TestMethod::PearsonT, pearson_r(x, y)?, (x.len() - 2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(values: &[f64]) -> Sample {
        Sample::new(values.to_vec()).unwrap()
    }

    #[test]
    fn continuity_bands() {
        let half = (7.0f64 / 11.0).sqrt();
        let quarter = (7.0f64 / 11.0).powf(0.25);
        let eighth = (7.0f64 / 11.0).powf(0.125);
        assert_eq!(continuity_correction(2).unwrap(), half);
        assert_eq!(continuity_correction(75).unwrap(), half);
        assert_eq!(continuity_correction(76).unwrap(), quarter);
        assert_eq!(continuity_correction(749).unwrap(), quarter);
        assert_eq!(continuity_correction(750).unwrap(), eighth);
        assert_eq!(continuity_correction(100_000).unwrap(), eighth);
        assert!(continuity_correction(1).is_err());
        // the factors shrink the statistic and approach 1 from below
        assert!(half < quarter && quarter < eighth && eighth < 1.0);
    }

    #[test]
    fn population_variance_closed_form() {
        // (n-1)^2 (n+4) (2n-1) / (18 n) at n = 2: 1 * 6 * 3 / 36
        assert!((population_distance_variance(2).unwrap() - 0.5).abs() < 1e-15);
        assert!((population_distance_variance(20).unwrap() - 938.6).abs() < 1e-10);
        assert!(population_distance_variance(1).is_err());
    }

    #[test]
    fn adjusted_variance_guards_pooling() {
        assert!(matches!(
            adjusted_population_variance(10, 0.0),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            adjusted_population_variance(10, -0.3),
            Err(Error::Degenerate(_))
        ));
        let v = population_distance_variance(10).unwrap();
        assert!((adjusted_population_variance(10, 0.25).unwrap() - 4.0 * v).abs() < 1e-12);
    }

    #[test]
    fn literal_pooling_is_tie_adjusted() {
        // the literal denominator turns the cross concentration into
        // the tie-adjusted coefficient
        let x = s(&[1.0, 1.0, 2.0, 3.0]);
        let y = s(&[2.0, 1.0, 3.0, 3.0]);
        let literal = pooled_concentration(&x, &y, Variant::EquationLiteral).unwrap();
        let adjusted = crate::estimators::kendall_tau_b(&x, &y).unwrap().estimate;
        assert!((literal - adjusted).abs() < 1e-14);
    }

    #[test]
    fn wald_test_on_hand_checked_fixture() {
        // x strictly increasing, y = (1, 1, 2): d = 1, cross = 2/3
        let x = s(&[1.0, 2.0, 3.0]);
        let y = s(&[1.0, 1.0, 2.0]);
        let r = tau_wald_test(&x, &y, CorrectionPolicy::example_consistent()).unwrap();
        let v3 = population_distance_variance(3).unwrap();
        let want = continuity_correction(3).unwrap() * 1.0 / (v3 / (2.0 / 3.0)).sqrt();
        assert!((r.statistic - want).abs() < 1e-14);
        assert!((r.estimate - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(r.df, None);
        assert_eq!(r.distribution, ReferenceDistribution::Normal);
        assert_eq!(r.variant, Some(Variant::ExampleConsistent));
        let p_want = 2.0 * (1.0 - normal_cdf(want));
        assert!((r.p_value - p_want).abs() < 1e-14);
    }

    #[test]
    fn literal_variant_is_negative_t() {
        let x = s(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = s(&[2.0, 1.0, 3.0, 5.0, 4.0]);
        let r = tau_wald_test(&x, &y, CorrectionPolicy::equation_literal()).unwrap();
        assert!(r.statistic < 0.0);
        assert_eq!(r.df, Some(3.0));
        assert_eq!(r.correction_c, 1.0);
        assert_eq!(r.distribution, ReferenceDistribution::StudentT);
        // opting into the continuity factor shrinks the magnitude
        let policy = CorrectionPolicy::equation_literal().with_continuity(true);
        let shrunk = tau_wald_test(&x, &y, policy).unwrap();
        assert!(shrunk.statistic.abs() < r.statistic.abs());
        assert!((shrunk.statistic - r.statistic * continuity_correction(5).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn one_sample_degrees_of_freedom() {
        let x = s(&[2.0, 1.0, 3.0, 3.0, 5.0, 4.0]);
        let reference = s(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let literal =
            one_sample_tau_test(&x, &reference, CorrectionPolicy::equation_literal()).unwrap();
        assert_eq!(literal.df, Some(5.0));
        assert_eq!(literal.method, TestMethod::OneSampleTauWald);
        let consistent =
            one_sample_tau_test(&x, &reference, CorrectionPolicy::example_consistent()).unwrap();
        assert_eq!(consistent.df, None);
    }

    #[test]
    fn negative_association_is_degenerate_for_wald_pooling() {
        let x = s(&[1.0, 2.0, 3.0, 4.0]);
        let y = s(&[4.0, 3.0, 2.0, 1.0]);
        assert!(matches!(
            tau_wald_test(&x, &y, CorrectionPolicy::example_consistent()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn t_transform_round_trips() {
        for &rho in &[-0.95, -0.4, 0.0, 0.2578947, 0.7, 0.999] {
            for &df in &[1.0, 5.0, 18.0, 133.0] {
                let t = t_transform(rho, df).unwrap();
                let back = t / (t * t + df).sqrt();
                assert!((back - rho).abs() < 1e-12, "rho {rho} df {df}");
            }
        }
        assert!(t_transform(1.0, 5.0).is_err());
        assert!(t_transform(0.5, 0.0).is_err());
    }

    #[test]
    fn rho_test_matches_direct_formula() {
        let x = s(&[3.0, 1.0, 4.0, 1.5, 5.0, 9.0, 2.0]);
        let y = s(&[2.0, 7.0, 1.0, 8.0, 2.5, 8.0, 3.0]);
        let r = rho_t_test(&x, &y).unwrap();
        let rho = rho_kappa(&x, &y).unwrap().estimate;
        let want = rho * (5.0 / (1.0 - rho * rho)).sqrt();
        assert!((r.statistic - want).abs() < 1e-14);
        assert_eq!(r.df, Some(5.0));
        assert_eq!(r.variant, None);
        assert_eq!(r.correction_c, 1.0);

        let one = one_sample_rho_test(&x, &y).unwrap();
        assert_eq!(one.df, Some(6.0));
        assert!(one.statistic.abs() > r.statistic.abs() * 0.9);
    }

    #[test]
    fn pearson_test_needs_three_points() {
        let x = s(&[1.0, 2.0]);
        let y = s(&[2.0, 1.0]);
        assert!(matches!(
            pearson_t_test(&x, &y),
            Err(Error::TooShort { .. })
        ));
        assert!(matches!(rho_t_test(&x, &y), Err(Error::TooShort { .. })));
    }

    #[test]
    fn p_values_stay_in_unit_interval() {
        let x = s(&[1.0, 3.0, 2.0, 5.0, 4.0, 7.0, 6.0]);
        let y = s(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        for policy in [
            CorrectionPolicy::example_consistent(),
            CorrectionPolicy::equation_literal(),
            CorrectionPolicy::example_consistent().with_continuity(false),
        ] {
            let r = tau_wald_test(&x, &y, policy).unwrap();
            assert!((0.0..=1.0).contains(&r.p_value), "{policy:?}");
        }
        let r = rho_t_test(&x, &y).unwrap();
        assert!((0.0..=1.0).contains(&r.p_value));
    }
}
