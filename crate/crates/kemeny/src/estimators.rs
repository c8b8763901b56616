//! Correlation estimators over paired samples.
//!
//! The two headline estimators are the pair-agreement coefficient
//! (`tau_kappa`) and the centred-rank product-moment coefficient
//! (`rho_kappa`). Pearson on raw values, Spearman on midranks and the
//! tie-adjusted Kendall coefficient are provided for comparison runs;
//! `spearman_rho` is by construction the same computation as
//! `rho_kappa`, because centred midrank scores are an affine map of
//! midranks and the product-moment form is affine invariant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{pair_counts, rank_vector};
use crate::sample::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TauKappa,
    RhoKappa,
    PearsonR,
    SpearmanRho,
    KendallTauB,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::TauKappa => "tau_kappa",
            Method::RhoKappa => "rho_kappa",
            Method::PearsonR => "pearson_r",
            Method::SpearmanRho => "spearman_rho",
            Method::KendallTauB => "kendall_tau_b",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub method: Method,
    pub estimate: f64,
    pub n: usize,
}

fn require_non_constant(x: &Sample, y: &Sample) -> Result<()> {
    if x.is_constant() || y.is_constant() {
        return Err(Error::Degenerate(
            "constant sample has no defined correlation",
        ));
    }
    Ok(())
}

/// Product-moment correlation of two equal-length score slices.
/// Clamps the last-bit overshoot so callers can rely on [-1, 1].
fn product_moment(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::Degenerate(
            "zero variance in product-moment correlation",
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pair-agreement coefficient: (concordant - discordant) / all pairs.
pub fn tau_kappa(x: &Sample, y: &Sample) -> Result<CorrelationEstimate> {
    let counts = pair_counts(x, y)?;
    let estimate = counts.net_agreement() as f64 / counts.total() as f64;
    Ok(CorrelationEstimate {
        method: Method::TauKappa,
        estimate,
        n: x.len(),
    })
}

fn centred_rank_correlation(x: &Sample, y: &Sample) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    require_non_constant(x, y)?;
    product_moment(rank_vector(x).entries(), rank_vector(y).entries())
}

/// Product-moment correlation of the centred midrank scores.
pub fn rho_kappa(x: &Sample, y: &Sample) -> Result<CorrelationEstimate> {
    let estimate = centred_rank_correlation(x, y)?;
    Ok(CorrelationEstimate {
        method: Method::RhoKappa,
        estimate,
        n: x.len(),
    })
}

/// Midrank Spearman coefficient. Shares the `rho_kappa` code path, so
/// the two are equal bit for bit, not merely to rounding.
pub fn spearman_rho(x: &Sample, y: &Sample) -> Result<CorrelationEstimate> {
    let estimate = centred_rank_correlation(x, y)?;
    Ok(CorrelationEstimate {
        method: Method::SpearmanRho,
        estimate,
        n: x.len(),
    })
}

/// Pearson correlation of the raw observations. Unlike the rank
/// estimators this needs finite values.
pub fn pearson_r(x: &Sample, y: &Sample) -> Result<CorrelationEstimate> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if let Some(v) = x.values().iter().chain(y.values()).find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "pearson_r needs finite observations, got {v}"
        )));
    }
    require_non_constant(x, y)?;
    let estimate = product_moment(x.values(), y.values())?;
    Ok(CorrelationEstimate {
        method: Method::PearsonR,
        estimate,
        n: x.len(),
    })
}

/// Tie-adjusted Kendall coefficient with the geometric-mean
/// denominator. On tie-free data the denominator equals the pair total
/// exactly, so the value coincides with `tau_kappa` bit for bit.
pub fn kendall_tau_b(x: &Sample, y: &Sample) -> Result<CorrelationEstimate> {
    let counts = pair_counts(x, y)?;
    let untied_x = counts.total() - counts.tied_x;
    let untied_y = counts.total() - counts.tied_y;
    if untied_x == 0 || untied_y == 0 {
        return Err(Error::Degenerate(
            "constant sample has no defined correlation",
        ));
    }
    let denom = (untied_x as f64 * untied_y as f64).sqrt();
    let estimate = counts.net_agreement() as f64 / denom;
    Ok(CorrelationEstimate {
        method: Method::KendallTauB,
        estimate,
        n: x.len(),
    })
}

/// Maps a pair-agreement coefficient onto the product-moment scale of
/// the underlying bivariate normal: sin(tau * pi / 2).
pub fn sin_transform(tau: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&tau) {
        return Err(Error::Domain(format!(
            "sin_transform needs |tau| <= 1, got {tau}"
        )));
    }
    Ok((tau * std::f64::consts::FRAC_PI_2).sin())
}
