//! Command line surface.
//!
//! Conventions shared by every subcommand: `--format` picks JSON (the
//! full, versioned schema) or CSV (flat tables), `--threads` caps the
//! worker count for the seeded engines, and data flows in either from
//! an embedded dataset (`--data sleep`) or from a headed CSV file
//! (`--input` with `--x`/`--y` column selectors).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "kemeny",
    version,
    about = "Rank statistics on the Kemeny metric",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Worker threads for the seeded engines; 0 uses every host core.
    /// Falls back to the KEMENY_THREADS environment variable. Output
    /// is identical for every setting.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All five correlation estimators for a pair of columns.
    Corr(DataArgs),

    /// Hypothesis tests: Wald tests of the pair-agreement coefficient
    /// and t tests of the correlation estimators.
    Test(TestArgs),

    /// Seeded null-distribution simulation of a standardised statistic.
    Simulate(SimulateArgs),

    /// Seeded case-resampling bootstrap of the five estimators.
    Bootstrap(BootstrapArgs),

    /// Exhaustive small-n population reports: the exact distance
    /// distribution, the metric axioms, the variance formula audit.
    Oracle(OracleArgs),
}

/// Where the paired columns come from.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// Embedded dataset (available: sleep).
    #[arg(long, value_name = "NAME", conflicts_with_all = ["input", "x", "y"])]
    pub data: Option<String>,

    /// CSV file with a header row. Cells are decimal numbers with a
    /// '.' separator; Inf and -Inf are accepted, anything else is a
    /// data error.
    #[arg(long, value_name = "PATH", required_unless_present = "data")]
    pub input: Option<PathBuf>,

    /// First margin, by column name (default: the first column).
    #[arg(long, value_name = "COLUMN")]
    pub x: Option<String>,

    /// Second margin, by column name (default: the second column).
    /// For one-sample tests this is the reference ordering and may be
    /// omitted, which uses the identity ordering 1..n.
    #[arg(long, value_name = "COLUMN")]
    pub y: Option<String>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// one-sample tests a margin against a fixed reference ordering;
    /// two-sample tests the paired margins against each other.
    #[arg(value_enum)]
    pub scope: Scope,

    /// Statistic family. pearson exists only in two-sample form.
    #[arg(long, value_enum)]
    pub method: TestMethodArg,

    /// Pooled-concentration variant, tau tests only
    /// (default: example-consistent).
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,

    /// Continuity factor override, tau tests only. The default follows
    /// the variant: on for example-consistent, off for equation-literal.
    #[arg(long, value_enum)]
    pub continuity: Option<Toggle>,

    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    OneSample,
    TwoSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestMethodArg {
    Tau,
    Rho,
    Pearson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    ExampleConsistent,
    EquationLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sample size per replicate.
    #[arg(long, value_name = "N")]
    pub n: usize,

    /// Number of replicates.
    #[arg(long, value_name = "COUNT")]
    pub replicates: u64,

    /// Generator seed. Required: every run is reproducible by
    /// construction, there is no silent nondeterminism to fall back on.
    #[arg(long, value_name = "SEED")]
    pub seed: u64,

    /// Null data-generating process for each replicate.
    #[arg(long, value_enum, default_value_t = DgpArg::UniformLabels)]
    pub dgp: DgpArg,

    /// Statistic each replicate computes.
    #[arg(long, value_enum)]
    pub test: TestKindArg,

    /// Pooled-concentration variant for the tau statistics
    /// (default: example-consistent).
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,

    /// Continuity factor override for the tau statistics.
    #[arg(long, value_enum)]
    pub continuity: Option<Toggle>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DgpArg {
    /// n labels drawn iid uniform on {1, ..., n}; ties are common.
    UniformLabels,
    /// A uniform random permutation of 1..=n; tie-free.
    TieFreePermutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestKindArg {
    OneSampleTau,
    TwoSampleTau,
    OneSampleRho,
    TwoSampleRho,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    /// Number of bootstrap replicates (at least 100).
    #[arg(long, value_name = "COUNT")]
    pub replicates: u64,

    /// Generator seed. Required, as for simulate.
    #[arg(long, value_name = "SEED")]
    pub seed: u64,

    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Population size. The population has n^n - n members, so cost
    /// grows very fast; the distribution report is guarded at n <= 7.
    #[arg(long, value_name = "N")]
    pub n: usize,

    /// Which report to produce.
    #[arg(long, value_enum, default_value_t = ReportArg::Distribution)]
    pub report: ReportArg,

    /// Raise the enumeration guard for the distribution report
    /// (hard cap 15; expect hours beyond n = 10).
    #[arg(long, value_name = "N")]
    pub max_n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportArg {
    /// Exact distance distribution against the identity reference.
    Distribution,
    /// Identity, symmetry and triangle checks over the population.
    Axioms,
    /// Closed-form variance formula against exhaustive enumeration.
    Variance,
}
