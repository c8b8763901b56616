//! Seeded Monte Carlo and bootstrap harnesses.
//!
//! Every replicate owns ChaCha stream `replicate_index` of a generator
//! seeded with the run seed, so results are independent of worker
//! count and of whether the `parallel` feature is enabled. A replicate
//! that lands on a degenerate draw (constant margin, non-positive
//! pooling, perfect correlation) redraws from its own stream and the
//! redraw is counted, which keeps the statistic stream well defined
//! without disturbing any other replicate.
//!
//! The rho statistics simulated here use the classical t-transform on
//! n - 2 degrees of freedom for both the one- and two-sample kinds;
//! the fitted reference degrees of freedom reported alongside stay at
//! n - 1 for the one-sample kind and n - 2 for the two-sample kind.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dist::{
    ks_pvalue, ks_statistic, normal_cdf, quantile_sorted, student_t_cdf, summarize, SummaryStats,
};
use crate::engine;
use crate::error::{Error, Result};
use crate::estimators::{kendall_tau_b, pearson_r, rho_kappa, spearman_rho, tau_kappa, Method};
use crate::inference::{one_sample_tau_test, t_transform, tau_wald_test, CorrectionPolicy};
use crate::sample::Sample;

/// Null data-generating processes on the label space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dgp {
    /// n labels drawn iid uniform on {1, ..., n}; ties are common.
    UniformLabels,
    /// a uniform random permutation of 1..=n; tie-free.
    TieFreePermutation,
}

/// Which statistic each replicate computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    OneSampleTau,
    TwoSampleTau,
    OneSampleRho,
    TwoSampleRho,
}

impl TestKind {
    fn is_one_sample(self) -> bool {
        matches!(self, TestKind::OneSampleTau | TestKind::OneSampleRho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub replicates: u64,
    pub seed: u64,
    pub dgp: Dgp,
    pub test: TestKind,
    pub policy: CorrectionPolicy,
}

/// Summary of a simulated statistic stream: moments, plus asymptotic
/// KS p-values against the standard normal and against Student t on
/// `ks_df` degrees of freedom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub stats: SummaryStats,
    pub ks_df: f64,
    pub ks_p_normal: f64,
    pub ks_p_student_t: f64,
    pub degenerate_redraws: u64,
}

/// The generator owned by one replicate of a seeded run.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

fn draw(dgp: Dgp, n: usize, rng: &mut ChaCha8Rng) -> Sample {
    let labels: Vec<u32> = match dgp {
        Dgp::UniformLabels => (0..n).map(|_| rng.random_range(1..=n as u32)).collect(),
        Dgp::TieFreePermutation => {
            let mut labels: Vec<u32> = (1..=n as u32).collect();
            labels.shuffle(rng);
            labels
        }
    };
    Sample::from_labels(&labels).expect("n >= 2 is validated before simulating")
}

const REDRAW_CAP: u64 = 100_000;

/// Draws until the statistic is defined, counting discarded draws.
fn simulate_one<F>(
    config: &SimulationConfig,
    identity: &Sample,
    replicate: u64,
    stat: F,
) -> Result<(f64, u64)>
where
    F: Fn(&Sample, &Sample) -> Result<f64>,
{
    let mut rng = replicate_rng(config.seed, replicate);
    let mut redraws = 0u64;
    loop {
        let x = draw(config.dgp, config.n, &mut rng);
        let other = if config.test.is_one_sample() {
            None
        } else {
            Some(draw(config.dgp, config.n, &mut rng))
        };
        let y = other.as_ref().unwrap_or(identity);
        match stat(&x, y) {
            Ok(value) => return Ok((value, redraws)),
            Err(Error::Degenerate(_)) => {
                redraws += 1;
                if redraws > REDRAW_CAP {
                    return Err(Error::Degenerate(
                        "replicate exceeded the degenerate-redraw cap",
                    ));
                }
            }
            Err(other) => return Err(other),
        }
    }
}

/// Runs a seeded null simulation. Output is bit-identical for any
/// `threads` value, including 0 (host width).
pub fn run_simulation(config: &SimulationConfig, threads: usize) -> Result<SimulationReport> {
    if config.replicates < 2 {
        return Err(Error::InsufficientReplicates {
            got: config.replicates,
            min: 2,
        });
    }
    let min_n = match config.test {
        TestKind::OneSampleTau => 2,
        // the t-transform and the literal pooling need n - 2 > 0
        _ => 3,
    };
    if config.n < min_n {
        return Err(Error::TooShort {
            len: config.n,
            min: min_n,
        });
    }

    let identity = Sample::new((1..=config.n).map(|i| i as f64).collect())?;
    let policy = config.policy;
    let t_df = (config.n - 2) as f64;

    let outcomes: Vec<Result<(f64, u64)>> =
        engine::map_indexed(threads, config.replicates as usize, |i| match config.test {
            TestKind::OneSampleTau => simulate_one(config, &identity, i as u64, |x, r| {
                Ok(one_sample_tau_test(x, r, policy)?.statistic)
            }),
            TestKind::TwoSampleTau => simulate_one(config, &identity, i as u64, |x, y| {
                Ok(tau_wald_test(x, y, policy)?.statistic)
            }),
            TestKind::OneSampleRho | TestKind::TwoSampleRho => {
                simulate_one(config, &identity, i as u64, |x, y| {
                    t_transform(rho_kappa(x, y)?.estimate, t_df)
                })
            }
        });

    let mut statistics = Vec::with_capacity(outcomes.len());
    let mut degenerate_redraws = 0u64;
    for outcome in outcomes {
        let (value, redraws) = outcome?;
        statistics.push(value);
        degenerate_redraws += redraws;
    }

    let stats = summarize(&statistics)?;
    let ks_df = if config.test.is_one_sample() {
        (config.n - 1) as f64
    } else {
        (config.n - 2) as f64
    };
    let d_normal = ks_statistic(&statistics, normal_cdf)?;
    let d_student = ks_statistic(&statistics, |t| {
        student_t_cdf(t, ks_df).expect("ks_df is positive by construction")
    })?;
    Ok(SimulationReport {
        config: *config,
        stats,
        ks_df,
        ks_p_normal: ks_pvalue(d_normal, statistics.len())?,
        ks_p_student_t: ks_pvalue(d_student, statistics.len())?,
        degenerate_redraws,
    })
}

/// Bootstrap distribution of one estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapSummary {
    pub method: Method,
    pub replicates: u64,
    pub stats: SummaryStats,
    /// 2.5% and 97.5% interpolated quantiles of the replicate stream.
    pub q2_5: f64,
    pub q97_5: f64,
    pub degenerate_redraws: u64,
}

const BOOTSTRAP_METHODS: [Method; 5] = [
    Method::TauKappa,
    Method::RhoKappa,
    Method::PearsonR,
    Method::SpearmanRho,
    Method::KendallTauB,
];

const MIN_BOOTSTRAP_REPLICATES: u64 = 100;

/// Case-resampling bootstrap of all five correlation estimators on a
/// paired sample. Replicates whose resampled margins are constant are
/// redrawn within their own stream and counted.
pub fn bootstrap_correlations(
    x: &Sample,
    y: &Sample,
    replicates: u64,
    seed: u64,
    threads: usize,
) -> Result<Vec<BootstrapSummary>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if replicates < MIN_BOOTSTRAP_REPLICATES {
        return Err(Error::InsufficientReplicates {
            got: replicates,
            min: MIN_BOOTSTRAP_REPLICATES,
        });
    }
    if x.is_constant() || y.is_constant() {
        return Err(Error::Degenerate("constant sample cannot be bootstrapped"));
    }
    if let Some(v) = x.values().iter().chain(y.values()).find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "bootstrap of the Pearson estimator needs finite observations, got {v}"
        )));
    }

    let n = x.len();
    let outcomes: Vec<Result<([f64; 5], u64)>> =
        engine::map_indexed(threads, replicates as usize, |i| {
            let mut rng = replicate_rng(seed, i as u64);
            let mut redraws = 0u64;
            loop {
                let mut xs = Vec::with_capacity(n);
                let mut ys = Vec::with_capacity(n);
                for _ in 0..n {
                    let idx = rng.random_range(0..n);
                    xs.push(x.values()[idx]);
                    ys.push(y.values()[idx]);
                }
                let bx = Sample::new(xs).expect("resample keeps length and finiteness");
                let by = Sample::new(ys).expect("resample keeps length and finiteness");
                if bx.is_constant() || by.is_constant() {
                    redraws += 1;
                    if redraws > REDRAW_CAP {
                        return Err(Error::Degenerate(
                            "replicate exceeded the degenerate-redraw cap",
                        ));
                    }
                    continue;
                }
                let values = [
                    tau_kappa(&bx, &by)?.estimate,
                    rho_kappa(&bx, &by)?.estimate,
                    pearson_r(&bx, &by)?.estimate,
                    spearman_rho(&bx, &by)?.estimate,
                    kendall_tau_b(&bx, &by)?.estimate,
                ];
                return Ok((values, redraws));
            }
        });

    let mut streams: [Vec<f64>; 5] = std::array::from_fn(|_| Vec::with_capacity(outcomes.len()));
    let mut degenerate_redraws = 0u64;
    for outcome in outcomes {
        let (values, redraws) = outcome?;
        for (stream, value) in streams.iter_mut().zip(values) {
            stream.push(value);
        }
        degenerate_redraws += redraws;
    }

    BOOTSTRAP_METHODS
        .iter()
        .zip(streams)
        .map(|(&method, stream)| {
            let stats = summarize(&stream)?;
            let mut sorted = stream;
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("estimates are never NaN"));
            Ok(BootstrapSummary {
                method,
                replicates,
                stats,
                q2_5: quantile_sorted(&sorted, 0.025)?,
                q97_5: quantile_sorted(&sorted, 0.975)?,
                degenerate_redraws,
            })
        })
        .collect()
}
