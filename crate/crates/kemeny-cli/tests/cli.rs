//! End-to-end checks of the binary: frozen regression values, the
//! exit-code contract, format round-trips, and seeded reproducibility
//! across worker counts.

use std::io::Write;
use std::process::{Command, Output};

use kemeny::inference::CorrectionPolicy;
use kemeny::simulation::{run_simulation, Dgp, SimulationConfig, TestKind};

fn kemeny(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kemeny"))
        .args(args)
        .env_remove("KEMENY_THREADS")
        .output()
        .expect("binary runs")
}

fn kemeny_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kemeny"))
        .args(args)
        .env_remove("KEMENY_THREADS")
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn json(args: &[&str]) -> serde_json::Value {
    let output = kemeny(args);
    assert_eq!(
        exit_code(&output),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn temp_csv(content: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
    file.write_all(content.as_bytes()).unwrap();
    file.flush().unwrap();
    file
}

// Separately launched processes can disagree by 1 ulp on libm-backed
// pipelines (the host math library selects code paths per process), so
// comparisons that span two invocations allow a tiny relative error.
// Bit equality across thread counts within one process is asserted by the
// library's acceptance suite.
fn assert_close(a: f64, b: f64, context: &str) {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    assert!((a - b).abs() <= 1e-12 * scale, "{context}: {a} vs {b}");
}

fn assert_json_close(a: &serde_json::Value, b: &serde_json::Value, path: &str) {
    use serde_json::Value;
    match (a, b) {
        (Value::Number(x), Value::Number(y)) if x.is_f64() || y.is_f64() => {
            assert_close(x.as_f64().unwrap(), y.as_f64().unwrap(), path);
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len(), "length at {path}");
            for (index, (item_a, item_b)) in x.iter().zip(y).enumerate() {
                assert_json_close(item_a, item_b, &format!("{path}[{index}]"));
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            assert_eq!(
                x.keys().collect::<Vec<_>>(),
                y.keys().collect::<Vec<_>>(),
                "keys at {path}"
            );
            for (key, value_a) in x {
                assert_json_close(value_a, &y[key], &format!("{path}.{key}"));
            }
        }
        _ => assert_eq!(a, b, "at {path}"),
    }
}

fn assert_csv_close(a: &[u8], b: &[u8]) {
    let rows = |bytes: &[u8]| -> Vec<Vec<String>> {
        csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(bytes)
            .records()
            .map(|record| record.unwrap().iter().map(str::to_owned).collect())
            .collect()
    };
    let (rows_a, rows_b) = (rows(a), rows(b));
    assert_eq!(rows_a.len(), rows_b.len());
    for (row_a, row_b) in rows_a.iter().zip(&rows_b) {
        assert_eq!(row_a.len(), row_b.len());
        for (cell_a, cell_b) in row_a.iter().zip(row_b) {
            match (cell_a.parse::<f64>(), cell_b.parse::<f64>()) {
                (Ok(x), Ok(y)) => assert_close(x, y, cell_a),
                _ => assert_eq!(cell_a, cell_b),
            }
        }
    }
}

#[test]
fn corr_on_the_embedded_pair_matches_frozen_values() {
    let out = json(&["corr", "--data", "sleep"]);
    assert_eq!(out["schema_version"], 1);
    assert_eq!(out["command"], "corr");
    assert_eq!(out["data"]["source"], "sleep");
    assert_eq!(out["data"]["x"], "extra");
    assert_eq!(out["data"]["y"], "group");
    assert_eq!(out["data"]["n"], 20);

    let results = out["results"].as_array().unwrap();
    let estimate = |method: &str| -> f64 {
        results
            .iter()
            .find(|row| row["method"] == method)
            .unwrap_or_else(|| panic!("no {method} row"))["estimate"]
            .as_f64()
            .unwrap()
    };
    assert!((estimate("tau_kappa") - 0.2578947).abs() < 1e-6);
    assert!((estimate("rho_kappa") - 0.4253639).abs() < 1e-6);
    assert!((estimate("pearson_r") - 0.4016626).abs() < 1e-6);
    // the same code path, so the same bits
    assert_eq!(estimate("spearman_rho"), estimate("rho_kappa"));
    let tau_b = 49.0 / (187.0f64 * 100.0).sqrt();
    assert!((estimate("kendall_tau_b") - tau_b).abs() < 1e-12);
    assert!(results.iter().all(|row| row["error"].is_null()));
}

#[test]
fn two_sample_tau_test_matches_the_frozen_normal_statistic() {
    let out = json(&["test", "two-sample", "--data", "sleep", "--method", "tau"]);
    let result = &out["result"];
    assert_eq!(result["method"], "tau_wald");
    assert_eq!(result["distribution"], "normal");
    assert_eq!(result["variant"], "example_consistent");
    assert!(result["df"].is_null());
    assert!((result["statistic"].as_f64().unwrap() - 1.864459).abs() < 1e-5);
    assert!((result["p_value"].as_f64().unwrap() - 0.06225727).abs() < 1e-6);
    assert!((result["estimate"].as_f64().unwrap() - 0.2578947).abs() < 1e-6);
    let c = (7.0f64 / 11.0).sqrt();
    assert!((result["correction_c"].as_f64().unwrap() - c).abs() < 1e-12);
}

#[test]
fn equation_literal_variant_reports_the_student_t_statistic() {
    let out = json(&[
        "test",
        "two-sample",
        "--data",
        "sleep",
        "--method",
        "tau",
        "--variant",
        "equation-literal",
    ]);
    let result = &out["result"];
    assert_eq!(result["variant"], "equation_literal");
    assert_eq!(result["distribution"], "student_t");
    assert_eq!(result["df"].as_f64().unwrap(), 18.0);
    assert_eq!(result["correction_c"].as_f64().unwrap(), 1.0);
    assert!((result["statistic"].as_f64().unwrap() - (-2.754967475868055)).abs() < 1e-9);
}

#[test]
fn one_sample_tests_default_to_the_identity_reference() {
    let tau = json(&["test", "one-sample", "--data", "sleep", "--method", "tau"]);
    assert_eq!(tau["data"]["y"], "identity");
    assert_eq!(tau["result"]["method"], "one_sample_tau_wald");
    let p = tau["result"]["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);

    let rho = json(&["test", "one-sample", "--data", "sleep", "--method", "rho"]);
    assert_eq!(rho["result"]["method"], "one_sample_rho_t");
    // one-sample reference has n - 1 degrees of freedom
    assert_eq!(rho["result"]["df"].as_f64().unwrap(), 19.0);
}

#[test]
fn named_column_selection_reorders_the_margins() {
    let file = temp_csv("left,right\n1,4\n2,3\n3,2\n4,1\n");
    let path = file.path().to_str().unwrap();
    let out = json(&["corr", "--input", path, "--x", "right", "--y", "left"]);
    assert_eq!(out["data"]["x"], "right");
    assert_eq!(out["data"]["y"], "left");
    let tau = out["results"][0]["estimate"].as_f64().unwrap();
    assert_eq!(tau, -1.0);
}

#[test]
fn csv_output_round_trips_through_parse() {
    let from_json = json(&["corr", "--data", "sleep"]);
    let output = kemeny(&["corr", "--data", "sleep", "--format", "csv"]);
    assert_eq!(exit_code(&output), 0);

    let mut reader = csv::Reader::from_reader(&output.stdout[..]);
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["method", "estimate", "n", "error"]
    );
    let estimate_column = headers.iter().position(|h| h == "estimate").unwrap();

    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let json_rows = from_json["results"].as_array().unwrap();
    assert_eq!(rows.len(), json_rows.len());
    for (record, json_row) in rows.iter().zip(json_rows) {
        let cell = record.get(estimate_column).unwrap();
        let parsed: f64 = cell.parse().unwrap();
        // identical bits through the CSV round trip
        assert_eq!(parsed, json_row["estimate"].as_f64().unwrap());
        // and the shortest-decimal form is stable under re-emission
        assert_eq!(cell, serde_json::to_string(&parsed).unwrap());
    }
}

#[test]
fn bootstrap_csv_matches_the_json_stream() {
    let args = [
        "bootstrap",
        "--data",
        "sleep",
        "--replicates",
        "150",
        "--seed",
        "5",
    ];
    let from_json = json(&args);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let output = kemeny(&csv_args);
    assert_eq!(exit_code(&output), 0);

    let mut reader = csv::Reader::from_reader(&output.stdout[..]);
    let headers = reader.headers().unwrap().clone();
    let column = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (method_col, mean_col, sd_col, lo_col, hi_col) = (
        column("method"),
        column("mean"),
        column("sd"),
        column("q2_5"),
        column("q97_5"),
    );

    let json_rows = from_json["results"].as_array().unwrap();
    assert_eq!(json_rows.len(), 5);
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), json_rows.len());
    for (record, json_row) in records.iter().zip(json_rows) {
        let method = json_row["method"].as_str().unwrap();
        assert_eq!(record.get(method_col).unwrap(), method);
        let cell_f64 = |col: usize| record.get(col).unwrap().parse::<f64>().unwrap();
        assert_close(
            cell_f64(mean_col),
            json_row["stats"]["mean"].as_f64().unwrap(),
            method,
        );
        assert_close(
            cell_f64(sd_col),
            json_row["stats"]["sd"].as_f64().unwrap(),
            method,
        );
        assert_close(cell_f64(lo_col), json_row["q2_5"].as_f64().unwrap(), method);
        assert_close(
            cell_f64(hi_col),
            json_row["q97_5"].as_f64().unwrap(),
            method,
        );
    }
}

#[test]
fn simulate_json_matches_the_library_run() {
    let out = json(&[
        "simulate",
        "--n",
        "10",
        "--replicates",
        "250",
        "--seed",
        "4242",
        "--test",
        "two-sample-tau",
        "--threads",
        "2",
    ]);
    let config = SimulationConfig {
        n: 10,
        replicates: 250,
        seed: 4242,
        dgp: Dgp::UniformLabels,
        test: TestKind::TwoSampleTau,
        policy: CorrectionPolicy::example_consistent(),
    };
    let report = run_simulation(&config, 1).unwrap();
    assert_json_close(
        &out["report"],
        &serde_json::to_value(&report).unwrap(),
        "report",
    );
}

#[test]
fn seeded_runs_are_identical_across_worker_counts() {
    let simulate = |threads: &str| {
        json(&[
            "simulate",
            "--n",
            "12",
            "--replicates",
            "300",
            "--seed",
            "9",
            "--test",
            "two-sample-rho",
            "--threads",
            threads,
        ])
    };
    assert_json_close(&simulate("1"), &simulate("4"), "simulate");

    let bootstrap = |threads: &str| {
        kemeny(&[
            "bootstrap",
            "--data",
            "sleep",
            "--replicates",
            "200",
            "--seed",
            "7",
            "--format",
            "csv",
            "--threads",
            threads,
        ])
        .stdout
    };
    let single = bootstrap("1");
    assert_csv_close(&single, &bootstrap("5"));

    // the environment variable is an alias for the flag
    let via_env = kemeny_with_env(
        &[
            "bootstrap",
            "--data",
            "sleep",
            "--replicates",
            "200",
            "--seed",
            "7",
            "--format",
            "csv",
        ],
        "KEMENY_THREADS",
        "3",
    );
    assert_eq!(exit_code(&via_env), 0);
    assert_csv_close(&single, &via_env.stdout);
}

#[test]
fn oracle_n2_reports_the_two_point_distribution() {
    let out = json(&["oracle", "--n", "2"]);
    assert_eq!(out["report_kind"], "distance_distribution");
    let report = &out["report"];
    assert_eq!(report["n"], 2);
    assert_eq!(report["cardinality"], 2);
    assert_eq!(report["max_distance"], 2);
    assert_eq!(report["mean"].as_f64().unwrap(), 1.0);
    assert_eq!(report["symmetric"], true);

    let masses = report["masses"].as_array().unwrap();
    assert_eq!(masses.len(), 3);
    assert_eq!(masses[0]["distance"], 0);
    assert_eq!(masses[0]["probability"].as_f64().unwrap(), 0.5);
    assert_eq!(masses[1]["count"], 0);
    assert_eq!(masses[2]["distance"], 2);
    assert_eq!(masses[2]["probability"].as_f64().unwrap(), 0.5);
}

#[test]
fn oracle_axiom_and_variance_reports_stay_exact_at_n3() {
    let axioms = json(&["oracle", "--n", "3", "--report", "axioms"]);
    assert_eq!(axioms["report_kind"], "metric_axioms");
    let report = &axioms["report"];
    assert_eq!(report["members"], 24);
    assert_eq!(report["exhaustive"], true);
    assert_eq!(report["identity_violations"], 0);
    assert_eq!(report["symmetry_violations"], 0);
    assert_eq!(report["triangle_violations"], 0);

    let variance = json(&["oracle", "--n", "3", "--report", "variance"]);
    assert_eq!(variance["report_kind"], "variance_audit");
    let report = &variance["report"];
    assert_eq!(report["variance_exact"], "35/12");
    assert_eq!(report["formula_exact"], "70/27");
    assert_eq!(report["ratio_exact"], "9/8");
}

#[test]
fn infinite_observations_flow_through_the_rank_estimators() {
    let file = temp_csv("a,b\n1,Inf\n2,3\n-Inf,1\n4,2\n");
    let path = file.path().to_str().unwrap();
    let out = json(&["corr", "--input", path]);
    let results = out["results"].as_array().unwrap();
    for row in results {
        match row["method"].as_str().unwrap() {
            "pearson_r" => {
                assert!(row["estimate"].is_null());
                assert!(row["error"].as_str().unwrap().contains("finite"));
            }
            _ => {
                assert!(row["estimate"].as_f64().is_some());
                assert!(row["error"].is_null());
            }
        }
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let na = temp_csv("a,b\n1,2\n3,NA\n");
    let nan = temp_csv("a,b\n1,2\n3,nan\n");
    let constant = temp_csv("a,b\n1,5\n2,5\n3,5\n");
    let single = temp_csv("a\n1\n2\n3\n");
    let ragged = temp_csv("a,b\n1\n");
    let plain = temp_csv("a,b\n1,2\n2,1\n3,3\n");

    let usage: &[&[&str]] = &[
        &["corr", "--data", "sleep", "--bogus"],
        &["corr"],
        &["nonsense"],
        &["corr", "--data", "nosuchset"],
        &[
            "simulate",
            "--n",
            "10",
            "--replicates",
            "100",
            "--test",
            "two-sample-tau",
        ],
        &[
            "bootstrap",
            "--data",
            "sleep",
            "--replicates",
            "5",
            "--seed",
            "1",
        ],
        &["oracle", "--n", "9"],
        &["oracle", "--n", "1"],
        &["oracle", "--n", "3", "--report", "axioms", "--max-n", "9"],
        &[
            "test",
            "one-sample",
            "--data",
            "sleep",
            "--method",
            "pearson",
        ],
        &[
            "test",
            "two-sample",
            "--data",
            "sleep",
            "--method",
            "rho",
            "--variant",
            "equation-literal",
        ],
        &[
            "simulate",
            "--n",
            "1",
            "--replicates",
            "100",
            "--seed",
            "1",
            "--test",
            "two-sample-tau",
        ],
    ];
    for args in usage {
        let output = kemeny(args);
        assert_eq!(exit_code(&output), 1, "expected usage error for {args:?}");
        assert!(!output.stderr.is_empty(), "no message for {args:?}");
    }

    let data: &[&[&str]] = &[
        &["corr", "--input", "/nonexistent/missing.csv"],
        &["corr", "--input", na.path().to_str().unwrap()],
        &["corr", "--input", nan.path().to_str().unwrap()],
        &["corr", "--input", single.path().to_str().unwrap()],
        &["corr", "--input", ragged.path().to_str().unwrap()],
        &[
            "corr",
            "--input",
            plain.path().to_str().unwrap(),
            "--x",
            "nosuchcolumn",
        ],
    ];
    for args in data {
        let output = kemeny(args);
        assert_eq!(exit_code(&output), 2, "expected data error for {args:?}");
        assert!(!output.stderr.is_empty(), "no message for {args:?}");
    }
    // the embedded margins are fixed, so --data rejects column selectors
    let both = kemeny(&["corr", "--data", "sleep", "--x", "extra"]);
    assert_eq!(exit_code(&both), 1);

    let degenerate = kemeny(&["corr", "--input", constant.path().to_str().unwrap()]);
    assert_eq!(exit_code(&degenerate), 3);
    let degenerate_test = kemeny(&[
        "test",
        "two-sample",
        "--input",
        constant.path().to_str().unwrap(),
        "--method",
        "rho",
    ]);
    assert_eq!(exit_code(&degenerate_test), 3);

    let env_garbage = kemeny_with_env(&["corr", "--data", "sleep"], "KEMENY_THREADS", "plenty");
    assert_eq!(exit_code(&env_garbage), 1);

    assert_eq!(exit_code(&kemeny(&["--help"])), 0);
    assert_eq!(exit_code(&kemeny(&["--version"])), 0);
    assert_eq!(exit_code(&kemeny(&[])), 1);
}
