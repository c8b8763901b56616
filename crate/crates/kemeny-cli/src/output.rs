//! Output schemas. JSON wraps every payload in a versioned envelope;
//! CSV flattens to one table whose floats parse back bit for bit
//! (both serializers emit the shortest round-tripping decimal).

use serde::Serialize;

use kemeny::inference::{ReferenceDistribution, TestResult, Variant};
use kemeny::simulation::{BootstrapSummary, Dgp, SimulationReport, TestKind};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'static str,
    #[serde(flatten)]
    payload: &'a T,
}

pub fn render_json<T: Serialize>(command: &'static str, payload: &T) -> Result<String, CliError> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        payload,
    };
    serde_json::to_string_pretty(&envelope)
        .map(|mut rendered| {
            rendered.push('\n');
            rendered
        })
        .map_err(|err| CliError::Data(format!("could not serialize output: {err}")))
}

pub fn render_csv_rows<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|err| CliError::Data(format!("could not serialize output: {err}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|err| CliError::Data(format!("could not flush output: {err}")))?;
    String::from_utf8(bytes).map_err(|err| CliError::Data(format!("output is not utf-8: {err}")))
}

/// Provenance block shared by the data-driven commands.
#[derive(Debug, Clone, Serialize)]
pub struct DataInfo {
    pub source: String,
    pub x: String,
    pub y: String,
    pub n: usize,
}

#[derive(Serialize)]
pub struct CorrPayload {
    pub data: DataInfo,
    pub results: Vec<CorrRow>,
}

/// One estimator's outcome. A method that is undefined on this input
/// (Pearson on infinite observations) keeps its row, with the reason
/// in `error` instead of a value.
#[derive(Debug, Clone, Serialize)]
pub struct CorrRow {
    pub method: &'static str,
    pub estimate: Option<f64>,
    pub n: usize,
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct TestPayload {
    pub data: DataInfo,
    pub result: TestResult,
}

#[derive(Serialize)]
pub struct SimulatePayload {
    pub report: SimulationReport,
}

#[derive(Serialize)]
pub struct BootstrapPayload {
    pub data: DataInfo,
    pub results: Vec<BootstrapSummary>,
}

#[derive(Serialize)]
pub struct OraclePayload<T: Serialize> {
    pub report_kind: &'static str,
    pub report: T,
}

// CSV cells spell enum values exactly as the JSON schema does.

pub fn variant_name(variant: Variant) -> &'static str {
    match variant {
        Variant::ExampleConsistent => "example_consistent",
        Variant::EquationLiteral => "equation_literal",
    }
}

pub fn distribution_name(distribution: ReferenceDistribution) -> &'static str {
    match distribution {
        ReferenceDistribution::Normal => "normal",
        ReferenceDistribution::StudentT => "student_t",
    }
}

pub fn dgp_name(dgp: Dgp) -> &'static str {
    match dgp {
        Dgp::UniformLabels => "uniform_labels",
        Dgp::TieFreePermutation => "tie_free_permutation",
    }
}

pub fn test_kind_name(kind: TestKind) -> &'static str {
    match kind {
        TestKind::OneSampleTau => "one_sample_tau",
        TestKind::TwoSampleTau => "two_sample_tau",
        TestKind::OneSampleRho => "one_sample_rho",
        TestKind::TwoSampleRho => "two_sample_rho",
    }
}

/// Flat CSV row for a test result; columns match the JSON keys.
#[derive(Serialize)]
pub struct TestRow {
    method: &'static str,
    estimate: f64,
    statistic: f64,
    df: Option<f64>,
    p_value: f64,
    n: usize,
    correction_c: f64,
    variant: Option<&'static str>,
    distribution: &'static str,
}

impl From<&TestResult> for TestRow {
    fn from(result: &TestResult) -> Self {
        TestRow {
            method: result.method.name(),
            estimate: result.estimate,
            statistic: result.statistic,
            df: result.df,
            p_value: result.p_value,
            n: result.n,
            correction_c: result.correction_c,
            variant: result.variant.map(variant_name),
            distribution: distribution_name(result.distribution),
        }
    }
}

/// Flat CSV row for a simulation report.
#[derive(Serialize)]
pub struct SimulateRow {
    n: usize,
    replicates: u64,
    seed: u64,
    dgp: &'static str,
    test: &'static str,
    variant: &'static str,
    continuity: bool,
    mean: f64,
    sd: f64,
    median: f64,
    mad: f64,
    min: f64,
    max: f64,
    range: f64,
    skewness: f64,
    kurtosis: f64,
    ks_df: f64,
    ks_p_normal: f64,
    ks_p_student_t: f64,
    degenerate_redraws: u64,
}

impl From<&SimulationReport> for SimulateRow {
    fn from(report: &SimulationReport) -> Self {
        let config = &report.config;
        let stats = &report.stats;
        SimulateRow {
            n: config.n,
            replicates: config.replicates,
            seed: config.seed,
            dgp: dgp_name(config.dgp),
            test: test_kind_name(config.test),
            variant: variant_name(config.policy.variant),
            continuity: config.policy.apply_continuity,
            mean: stats.mean,
            sd: stats.sd,
            median: stats.median,
            mad: stats.mad,
            min: stats.min,
            max: stats.max,
            range: stats.range,
            skewness: stats.skewness,
            kurtosis: stats.kurtosis,
            ks_df: report.ks_df,
            ks_p_normal: report.ks_p_normal,
            ks_p_student_t: report.ks_p_student_t,
            degenerate_redraws: report.degenerate_redraws,
        }
    }
}

/// Flat CSV row for one bootstrap method summary.
#[derive(Serialize)]
pub struct BootstrapRow {
    method: &'static str,
    replicates: u64,
    mean: f64,
    sd: f64,
    median: f64,
    mad: f64,
    min: f64,
    max: f64,
    range: f64,
    skewness: f64,
    kurtosis: f64,
    q2_5: f64,
    q97_5: f64,
    degenerate_redraws: u64,
}

impl From<&BootstrapSummary> for BootstrapRow {
    fn from(summary: &BootstrapSummary) -> Self {
        let stats = &summary.stats;
        BootstrapRow {
            method: summary.method.name(),
            replicates: summary.replicates,
            mean: stats.mean,
            sd: stats.sd,
            median: stats.median,
            mad: stats.mad,
            min: stats.min,
            max: stats.max,
            range: stats.range,
            skewness: stats.skewness,
            kurtosis: stats.kurtosis,
            q2_5: summary.q2_5,
            q97_5: summary.q97_5,
            degenerate_redraws: summary.degenerate_redraws,
        }
    }
}
