//! Binary entry point: argument dispatch, the exit-code contract, and
//! the glue between loaded data and the library calls.

mod args;
mod error;
mod input;
mod output;

use clap::error::ErrorKind;
use clap::Parser;

use kemeny::estimators::{
    kendall_tau_b, pearson_r, rho_kappa, spearman_rho, tau_kappa, CorrelationEstimate,
};
use kemeny::inference::{
    one_sample_rho_test, one_sample_tau_test, pearson_t_test, rho_t_test, tau_wald_test,
    CorrectionPolicy, TestResult,
};
use kemeny::oracle::{
    exact_distance_distribution_with_limit, verify_metric_axioms, verify_variance_formula,
    MAX_ENUMERATION_N,
};
use kemeny::simulation::{
    bootstrap_correlations, run_simulation, Dgp, SimulationConfig, SimulationReport, TestKind,
};
use kemeny::Sample;

use crate::args::{
    Cli, Command, DataArgs, DgpArg, OracleArgs, OutputFormat, ReportArg, Scope, SimulateArgs,
    TestArgs, TestKindArg, TestMethodArg, Toggle, VariantArg,
};
use crate::error::CliError;
use crate::input::{load_one_sample, load_pair, PairedData};
use crate::output::{
    render_csv_rows, render_json, BootstrapPayload, BootstrapRow, CorrPayload, CorrRow, DataInfo,
    OraclePayload, SimulatePayload, SimulateRow, TestPayload, TestRow,
};

const THREADS_ENV: &str = "KEMENY_THREADS";

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version requests are successful outcomes;
            // everything else clap rejects is a usage error
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    0
                }
                _ => {
                    eprint!("{err}");
                    1
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(rendered) => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            // a closed pipe downstream is not our failure
            let _ = stdout.write_all(rendered.as_bytes());
            let _ = stdout.flush();
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let threads = resolve_threads(cli.threads)?;
    match &cli.command {
        Command::Corr(data_args) => {
            let (data, results) = run_corr(data_args)?;
            match cli.format {
                OutputFormat::Json => render_json("corr", &CorrPayload { data, results }),
                OutputFormat::Csv => render_csv_rows(&results),
            }
        }
        Command::Test(test_args) => {
            let (data, result) = run_test(test_args)?;
            match cli.format {
                OutputFormat::Json => render_json("test", &TestPayload { data, result }),
                OutputFormat::Csv => render_csv_rows(&[TestRow::from(&result)]),
            }
        }
        Command::Simulate(sim_args) => {
            let report = run_simulate(sim_args, threads)?;
            match cli.format {
                OutputFormat::Json => render_json("simulate", &SimulatePayload { report }),
                OutputFormat::Csv => render_csv_rows(&[SimulateRow::from(&report)]),
            }
        }
        Command::Bootstrap(boot_args) => {
            let data = load_pair(&boot_args.data)?;
            let results = bootstrap_correlations(
                &data.x,
                &data.y,
                boot_args.replicates,
                boot_args.seed,
                threads,
            )
            .map_err(|err| CliError::from_library(err, false))?;
            match cli.format {
                OutputFormat::Json => render_json(
                    "bootstrap",
                    &BootstrapPayload {
                        data: info(&data),
                        results,
                    },
                ),
                OutputFormat::Csv => {
                    let rows: Vec<BootstrapRow> = results.iter().map(BootstrapRow::from).collect();
                    render_csv_rows(&rows)
                }
            }
        }
        Command::Oracle(oracle_args) => run_oracle(oracle_args, threads, cli.format),
    }
}

/// `--threads`, then KEMENY_THREADS, then 0 (all host cores).
fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(threads) = flag {
        return Ok(threads);
    }
    match std::env::var(THREADS_ENV) {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a non-negative integer, got '{raw}'"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(err) => Err(CliError::Usage(format!("{THREADS_ENV}: {err}"))),
    }
}

fn info(data: &PairedData) -> DataInfo {
    DataInfo {
        source: data.source.clone(),
        x: data.x_name.clone(),
        y: data.y_name.clone(),
        n: data.x.len(),
    }
}

type Estimator = fn(&Sample, &Sample) -> kemeny::Result<CorrelationEstimate>;

fn run_corr(args: &DataArgs) -> Result<(DataInfo, Vec<CorrRow>), CliError> {
    let data = load_pair(args)?;
    if data.x.is_constant() || data.y.is_constant() {
        return Err(CliError::Degenerate(
            "a constant column has no defined correlation".into(),
        ));
    }
    let estimators: [(&'static str, Estimator); 5] = [
        ("tau_kappa", tau_kappa),
        ("rho_kappa", rho_kappa),
        ("pearson_r", pearson_r),
        ("spearman_rho", spearman_rho),
        ("kendall_tau_b", kendall_tau_b),
    ];
    let results = estimators
        .iter()
        .map(|&(name, estimator)| match estimator(&data.x, &data.y) {
            Ok(est) => CorrRow {
                method: name,
                estimate: Some(est.estimate),
                n: est.n,
                error: None,
            },
            Err(err) => CorrRow {
                method: name,
                estimate: None,
                n: data.x.len(),
                error: Some(err.to_string()),
            },
        })
        .collect();
    Ok((info(&data), results))
}

fn build_policy(variant: Option<VariantArg>, continuity: Option<Toggle>) -> CorrectionPolicy {
    let base = match variant.unwrap_or(VariantArg::ExampleConsistent) {
        VariantArg::ExampleConsistent => CorrectionPolicy::example_consistent(),
        VariantArg::EquationLiteral => CorrectionPolicy::equation_literal(),
    };
    match continuity {
        Some(Toggle::On) => base.with_continuity(true),
        Some(Toggle::Off) => base.with_continuity(false),
        None => base,
    }
}

fn run_test(args: &TestArgs) -> Result<(DataInfo, TestResult), CliError> {
    if matches!(args.method, TestMethodArg::Rho | TestMethodArg::Pearson)
        && (args.variant.is_some() || args.continuity.is_some())
    {
        return Err(CliError::Usage(
            "--variant and --continuity apply only to --method tau".into(),
        ));
    }
    if args.method == TestMethodArg::Pearson && args.scope == Scope::OneSample {
        return Err(CliError::Usage(
            "pearson has no one-sample form; use two-sample".into(),
        ));
    }
    let policy = build_policy(args.variant, args.continuity);
    let data = match args.scope {
        Scope::TwoSample => load_pair(&args.data)?,
        Scope::OneSample => load_one_sample(&args.data)?,
    };
    let result = match (args.scope, args.method) {
        (Scope::TwoSample, TestMethodArg::Tau) => tau_wald_test(&data.x, &data.y, policy),
        (Scope::TwoSample, TestMethodArg::Rho) => rho_t_test(&data.x, &data.y),
        (Scope::TwoSample, TestMethodArg::Pearson) => pearson_t_test(&data.x, &data.y),
        (Scope::OneSample, TestMethodArg::Tau) => one_sample_tau_test(&data.x, &data.y, policy),
        (Scope::OneSample, TestMethodArg::Rho) => one_sample_rho_test(&data.x, &data.y),
        (Scope::OneSample, TestMethodArg::Pearson) => unreachable!("rejected above"),
    }
    .map_err(|err| CliError::from_library(err, false))?;
    Ok((info(&data), result))
}

fn run_simulate(args: &SimulateArgs, threads: usize) -> Result<SimulationReport, CliError> {
    let config = SimulationConfig {
        n: args.n,
        replicates: args.replicates,
        seed: args.seed,
        dgp: match args.dgp {
            DgpArg::UniformLabels => Dgp::UniformLabels,
            DgpArg::TieFreePermutation => Dgp::TieFreePermutation,
        },
        test: match args.test {
            TestKindArg::OneSampleTau => TestKind::OneSampleTau,
            TestKindArg::TwoSampleTau => TestKind::TwoSampleTau,
            TestKindArg::OneSampleRho => TestKind::OneSampleRho,
            TestKindArg::TwoSampleRho => TestKind::TwoSampleRho,
        },
        policy: build_policy(args.variant, args.continuity),
    };
    run_simulation(&config, threads).map_err(|err| CliError::from_library(err, true))
}

fn run_oracle(args: &OracleArgs, threads: usize, format: OutputFormat) -> Result<String, CliError> {
    if args.max_n.is_some() && args.report != ReportArg::Distribution {
        return Err(CliError::Usage(
            "--max-n applies only to --report distribution".into(),
        ));
    }
    if args.n < 2 {
        return Err(CliError::Usage(format!(
            "--n must be at least 2, got {}",
            args.n
        )));
    }
    match args.report {
        ReportArg::Distribution => {
            let identity = Sample::new((1..=args.n).map(|i| i as f64).collect())
                .map_err(|err| CliError::from_library(err, true))?;
            let limit = args.max_n.unwrap_or(MAX_ENUMERATION_N);
            let report = exact_distance_distribution_with_limit(&identity, threads, limit)
                .and_then(|dist| dist.report())
                .map_err(|err| CliError::from_library(err, true))?;
            match format {
                OutputFormat::Json => render_json(
                    "oracle",
                    &OraclePayload {
                        report_kind: "distance_distribution",
                        report,
                    },
                ),
                OutputFormat::Csv => render_csv_rows(&report.masses),
            }
        }
        ReportArg::Axioms => {
            let report = verify_metric_axioms(args.n, threads)
                .map_err(|err| CliError::from_library(err, true))?;
            match format {
                OutputFormat::Json => render_json(
                    "oracle",
                    &OraclePayload {
                        report_kind: "metric_axioms",
                        report,
                    },
                ),
                OutputFormat::Csv => render_csv_rows(&[report]),
            }
        }
        ReportArg::Variance => {
            let report = verify_variance_formula(args.n, threads)
                .map_err(|err| CliError::from_library(err, true))?;
            match format {
                OutputFormat::Json => render_json(
                    "oracle",
                    &OraclePayload {
                        report_kind: "variance_audit",
                        report,
                    },
                ),
                OutputFormat::Csv => render_csv_rows(&[report]),
            }
        }
    }
}
