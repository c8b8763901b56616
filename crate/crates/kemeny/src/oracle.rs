//! Exhaustive small-n population oracles.
//!
//! The population for sample length n is the set of label vectors
//! {1..n}^n minus the n constant vectors, n^n - n members in all. For
//! small n this is cheap to enumerate outright, which gives exact
//! rational answers to questions the closed-form layer only
//! approximates: the full distance distribution against a reference,
//! the population variance of the distance, and the metric axioms.
//!
//! Enumeration is guarded at n <= 7 (about 8 * 10^5 members); the
//! `_with_limit` constructors let a caller consciously raise that.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dist::BetaBinomial;
use crate::engine;
use crate::error::{Error, Result};
use crate::inference::population_distance_variance;
use crate::sample::Sample;

/// Default refusal point for exhaustive enumeration.
pub const MAX_ENUMERATION_N: usize = 7;

/// Hard cap: beyond this the raw index space overflows u64 anyway.
const ABSOLUTE_MAX_N: usize = 15;

/// Fixed seed for the sampled axiom checks at n = 5..7, so reports are
/// reproducible without configuration.
const AXIOM_SAMPLE_SEED: u64 = 0x6b656d656e79;

/// Number of members of the population: n^n - n.
pub fn population_cardinality(n: usize) -> Result<u128> {
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    (n as u128)
        .checked_pow(n as u32)
        .map(|raw| raw - n as u128)
        .ok_or_else(|| Error::Domain(format!("population cardinality for n = {n} overflows")))
}

fn guard_enumeration(n: usize, max_n: usize) -> Result<()> {
    let max_n = max_n.min(ABSOLUTE_MAX_N);
    if n < 2 || n > max_n {
        return Err(Error::EnumerationTooLarge {
            n,
            max: max_n,
            cardinality: population_cardinality(n.max(2)).unwrap_or(u128::MAX),
        });
    }
    Ok(())
}

fn decode_labels(mut idx: u64, n: usize, digits: &mut [u32]) {
    for k in (0..n).rev() {
        digits[k] = (idx % n as u64) as u32 + 1;
        idx /= n as u64;
    }
}

fn is_constant_labels(digits: &[u32]) -> bool {
    digits.iter().all(|&d| d == digits[0])
}

/// All members of the population in lexicographic label order.
/// Intended for tests and small-n reporting.
pub fn population_members(n: usize) -> Result<Vec<Vec<u32>>> {
    guard_enumeration(n, MAX_ENUMERATION_N)?;
    let raw = (n as u64).pow(n as u32);
    let mut members = Vec::with_capacity((raw - n as u64) as usize);
    let mut digits = vec![0u32; n];
    for idx in 0..raw {
        decode_labels(idx, n, &mut digits);
        if !is_constant_labels(&digits) {
            members.push(digits.clone());
        }
    }
    Ok(members)
}

fn label_sign(a: u32, b: u32) -> i64 {
    (a > b) as i64 - (a < b) as i64
}

fn value_sign(a: f64, b: f64) -> i64 {
    if a > b {
        1
    } else if a < b {
        -1
    } else {
        0
    }
}

/// Pairwise signs of a reference sample, flattened over k < l pairs.
fn reference_signs(reference: &Sample) -> Vec<i64> {
    let v = reference.values();
    let n = v.len();
    let mut signs = Vec::with_capacity(n * (n - 1) / 2);
    for k in 0..n {
        for l in k + 1..n {
            signs.push(value_sign(v[k], v[l]));
        }
    }
    signs
}

fn distance_to_reference(digits: &[u32], signs: &[i64]) -> u64 {
    let n = digits.len();
    let mut distance = 0u64;
    let mut p = 0;
    for k in 0..n {
        for l in k + 1..n {
            distance += (label_sign(digits[k], digits[l]) - signs[p]).unsigned_abs();
            p += 1;
        }
    }
    distance
}

fn distance_between(u: &[u32], v: &[u32]) -> u64 {
    let n = u.len();
    let mut distance = 0u64;
    for k in 0..n {
        for l in k + 1..n {
            distance += (label_sign(u[k], u[l]) - label_sign(v[k], v[l])).unsigned_abs();
        }
    }
    distance
}

/// Exact distribution of the distance to a fixed reference over the
/// uniform population.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceDistribution {
    n: usize,
    cardinality: u64,
    counts: BTreeMap<u64, u64>,
}

impl DistanceDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cardinality(&self) -> u64 {
        self.cardinality
    }

    /// Largest attainable distance, n^2 - n.
    pub fn max_distance(&self) -> u64 {
        (self.n * self.n - self.n) as u64
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// Exact probability mass at distance d.
    pub fn mass(&self, d: u64) -> Ratio<i128> {
        let count = self.counts.get(&d).copied().unwrap_or(0);
        Ratio::new(count as i128, self.cardinality as i128)
    }

    pub fn mean(&self) -> Ratio<i128> {
        let total: i128 = self
            .counts
            .iter()
            .map(|(&d, &c)| d as i128 * c as i128)
            .sum();
        Ratio::new(total, self.cardinality as i128)
    }

    pub fn variance(&self) -> Ratio<i128> {
        let sum_sq: i128 = self
            .counts
            .iter()
            .map(|(&d, &c)| (d as i128) * (d as i128) * c as i128)
            .sum();
        let mean = self.mean();
        Ratio::new(sum_sq, self.cardinality as i128) - mean * mean
    }

    /// Whether the mass function is symmetric about (n^2 - n) / 2.
    pub fn is_symmetric(&self) -> bool {
        let max = self.max_distance();
        (0..=max).all(|d| {
            self.counts.get(&d).copied().unwrap_or(0)
                == self.counts.get(&(max - d)).copied().unwrap_or(0)
        })
    }

    /// Serializable view with exact and floating masses side by side,
    /// plus the worst absolute error of the Beta-Binomial surrogate.
    pub fn report(&self) -> Result<DistanceReport> {
        let surrogate = BetaBinomial::distance_null(self.n)?;
        let mut masses = Vec::new();
        let mut surrogate_max_abs_error = 0.0f64;
        for d in 0..=self.max_distance() {
            let exact = self.mass(d);
            let probability = exact.to_f64().unwrap_or(f64::NAN);
            surrogate_max_abs_error =
                surrogate_max_abs_error.max((probability - surrogate.pmf(d)).abs());
            masses.push(MassEntry {
                distance: d,
                count: self.counts.get(&d).copied().unwrap_or(0),
                probability,
                probability_exact: ratio_string(exact),
            });
        }
        Ok(DistanceReport {
            n: self.n,
            cardinality: self.cardinality,
            max_distance: self.max_distance(),
            mean: self.mean().to_f64().unwrap_or(f64::NAN),
            mean_exact: ratio_string(self.mean()),
            variance: self.variance().to_f64().unwrap_or(f64::NAN),
            variance_exact: ratio_string(self.variance()),
            symmetric: self.is_symmetric(),
            surrogate_max_abs_error,
            masses,
        })
    }
}

fn ratio_string(r: Ratio<i128>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassEntry {
    pub distance: u64,
    pub count: u64,
    pub probability: f64,
    pub probability_exact: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    pub n: usize,
    pub cardinality: u64,
    pub max_distance: u64,
    pub mean: f64,
    pub mean_exact: String,
    pub variance: f64,
    pub variance_exact: String,
    pub symmetric: bool,
    /// max_d |exact mass - Beta-Binomial surrogate mass|
    pub surrogate_max_abs_error: f64,
    pub masses: Vec<MassEntry>,
}

/// Exact distance distribution against `reference`, enumerated over the
/// population of the reference's length. Guarded at n <= 7.
pub fn exact_distance_distribution(
    reference: &Sample,
    threads: usize,
) -> Result<DistanceDistribution> {
    exact_distance_distribution_with_limit(reference, threads, MAX_ENUMERATION_N)
}

/// As `exact_distance_distribution`, with an explicit enumeration cap
/// for callers that accept the cost. Hard-capped at n = 15.
pub fn exact_distance_distribution_with_limit(
    reference: &Sample,
    threads: usize,
    max_n: usize,
) -> Result<DistanceDistribution> {
    let n = reference.len();
    guard_enumeration(n, max_n)?;
    let raw = (n as u64).pow(n as u32);
    let signs = reference_signs(reference);

    // chunked over the raw index space; constants are skipped inline
    let workers = engine::effective_threads(threads) as u64;
    let chunk_count = (workers * 8).min(raw).max(1);
    let chunk_size = raw.div_ceil(chunk_count);
    let partials: Vec<BTreeMap<u64, u64>> =
        engine::map_indexed(threads, chunk_count as usize, |c| {
            let lo = c as u64 * chunk_size;
            let hi = (lo + chunk_size).min(raw);
            let mut counts = BTreeMap::new();
            let mut digits = vec![0u32; n];
            for idx in lo..hi {
                decode_labels(idx, n, &mut digits);
                if is_constant_labels(&digits) {
                    continue;
                }
                *counts
                    .entry(distance_to_reference(&digits, &signs))
                    .or_insert(0) += 1;
            }
            counts
        });

    let mut counts = BTreeMap::new();
    for partial in partials {
        for (d, c) in partial {
            *counts.entry(d).or_insert(0) += c;
        }
    }
    Ok(DistanceDistribution {
        n,
        cardinality: raw - n as u64,
        counts,
    })
}

/// Outcome of checking the metric axioms over the population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MetricAxiomReport {
    pub n: usize,
    pub members: u64,
    /// True when every pair and triple was checked, false when the
    /// population was too large and pairs/triples were sampled.
    pub exhaustive: bool,
    pub identity_checks: u64,
    pub symmetry_checks: u64,
    pub triangle_checks: u64,
    pub identity_violations: u64,
    pub symmetry_violations: u64,
    pub triangle_violations: u64,
}

impl MetricAxiomReport {
    pub fn violations(&self) -> u64 {
        self.identity_violations + self.symmetry_violations + self.triangle_violations
    }
}

/// Checks identity, symmetry and the triangle inequality over the
/// population for n. Exhaustive through n = 4; for n = 5..7 identity is
/// still exhaustive while symmetry and triangle checks run on a seeded
/// million-draw sample.
pub fn verify_metric_axioms(n: usize, threads: usize) -> Result<MetricAxiomReport> {
    guard_enumeration(n, MAX_ENUMERATION_N)?;
    let members = population_members(n)?;
    let m = members.len();

    let mut identity_violations = 0u64;
    for v in &members {
        if distance_between(v, v) != 0 {
            identity_violations += 1;
        }
    }

    if n <= 4 {
        // dense matrix, then every ordered pair and triple
        let matrix: Vec<u16> = engine::map_indexed(threads, m * m, |idx| {
            let (i, j) = (idx / m, idx % m);
            distance_between(&members[i], &members[j]) as u16
        });
        let at = |i: usize, j: usize| matrix[i * m + j];

        let mut symmetry_violations = 0u64;
        for i in 0..m {
            for j in 0..m {
                if at(i, j) != at(j, i) {
                    symmetry_violations += 1;
                }
            }
        }

        let triangle_violations: u64 = engine::map_indexed(threads, m, |i| {
            let mut bad = 0u64;
            for j in 0..m {
                let dij = at(i, j);
                for k in 0..m {
                    if at(i, k) > dij + at(j, k) {
                        bad += 1;
                    }
                }
            }
            bad
        })
        .into_iter()
        .sum();

        Ok(MetricAxiomReport {
            n,
            members: m as u64,
            exhaustive: true,
            identity_checks: m as u64,
            symmetry_checks: (m * m) as u64,
            triangle_checks: (m * m * m) as u64,
            identity_violations,
            symmetry_violations,
            triangle_violations,
        })
    } else {
        const SAMPLED: u64 = 1_000_000;
        let counts: Vec<(u64, u64)> = engine::map_indexed(threads, 64, |c| {
            let mut rng = ChaCha8Rng::seed_from_u64(AXIOM_SAMPLE_SEED);
            rng.set_stream(c as u64);
            let mut symmetry_violations = 0u64;
            let mut triangle_violations = 0u64;
            for _ in 0..SAMPLED / 64 {
                let i = rng.random_range(0..m);
                let j = rng.random_range(0..m);
                let k = rng.random_range(0..m);
                let dij = distance_between(&members[i], &members[j]);
                if dij != distance_between(&members[j], &members[i]) {
                    symmetry_violations += 1;
                }
                let dik = distance_between(&members[i], &members[k]);
                let djk = distance_between(&members[j], &members[k]);
                if dik > dij + djk {
                    triangle_violations += 1;
                }
            }
            (symmetry_violations, triangle_violations)
        });
        let symmetry_violations = counts.iter().map(|c| c.0).sum();
        let triangle_violations = counts.iter().map(|c| c.1).sum();
        let checked = SAMPLED / 64 * 64;
        Ok(MetricAxiomReport {
            n,
            members: m as u64,
            exhaustive: false,
            identity_checks: m as u64,
            symmetry_checks: checked,
            triangle_checks: checked,
            identity_violations,
            symmetry_violations,
            triangle_violations,
        })
    }
}

/// Exact population variance of the distance to the identity reference,
/// next to the closed-form approximation and their ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceAudit {
    pub n: usize,
    pub cardinality: u64,
    pub mean: f64,
    pub mean_exact: String,
    pub variance: f64,
    pub variance_exact: String,
    pub formula: f64,
    pub formula_exact: String,
    /// exact variance / closed-form value
    pub ratio: f64,
    pub ratio_exact: String,
    pub symmetric: bool,
}

/// Audits the closed-form distance variance against exhaustive
/// enumeration with the identity permutation as reference.
pub fn verify_variance_formula(n: usize, threads: usize) -> Result<VarianceAudit> {
    let identity = Sample::new((1..=n).map(|i| i as f64).collect())?;
    let dist = exact_distance_distribution(&identity, threads)?;

    // (n-1)^2 (n+4) (2n-1) / (18 n), kept rational
    let ni = n as i128;
    let formula_exact = Ratio::new((ni - 1) * (ni - 1) * (ni + 4) * (2 * ni - 1), 18 * ni);
    let variance_exact = dist.variance();
    let ratio_exact = variance_exact / formula_exact;

    Ok(VarianceAudit {
        n,
        cardinality: dist.cardinality(),
        mean: dist.mean().to_f64().unwrap_or(f64::NAN),
        mean_exact: ratio_string(dist.mean()),
        variance: variance_exact.to_f64().unwrap_or(f64::NAN),
        variance_exact: ratio_string(variance_exact),
        formula: population_distance_variance(n)?,
        formula_exact: ratio_string(formula_exact),
        ratio: ratio_exact.to_f64().unwrap_or(f64::NAN),
        ratio_exact: ratio_string(ratio_exact),
        symmetric: dist.is_symmetric(),
    })
}
