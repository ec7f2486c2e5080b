//! End-to-end behavior of the gc-moments binary: output shapes, formats,
//! exit codes, and flag validation.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gc-moments"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn help_documents_every_flag() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    for sub in ["moments", "embedded", "compare"] {
        assert!(stdout(&out).contains(sub), "missing {sub}");
    }
    let m = run(&["moments", "--help"]);
    let text = stdout(&m);
    for flag in ["--lambda", "--n", "--t-start", "--t-stop", "--t-step", "--cutoff", "--format", "--out"] {
        assert!(text.contains(flag), "moments --help missing {flag}");
    }
    let c = run(&["compare", "--help"]);
    let text = stdout(&c);
    for flag in ["--samples", "--seed", "--sigma", "--m-start", "--m-stop"] {
        assert!(text.contains(flag), "compare --help missing {flag}");
    }
    let e = run(&["embedded", "--help"]);
    assert!(stdout(&e).contains("--m-start"));
}

#[test]
fn moments_csv_shape() {
    let out = run(&["moments", "--lambda", "2", "--n", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,moment_Y_3,moment_X_3,kappa_1,kappa_2,kappa_3,skewness,kurtosis"
    );
    // Default grid 0..=5 step 0.5: 11 rows.
    assert_eq!(lines.count(), 11);
    // Kurtosis column is empty at n = 3; rows end with the comma.
    for row in text.lines().skip(1) {
        assert!(row.ends_with(','), "row {row}");
        assert_eq!(row.matches(',').count(), 7, "row {row}");
    }
    // Locale-independent: decimal points, no decimal commas.
    assert!(text.contains('.'));
    // At t = 0 the variance is 0, so skewness is empty too.
    let t0 = text.lines().nth(1).unwrap();
    assert!(t0.ends_with(",,"), "t=0 row: {t0}");
}

#[test]
fn moments_symbolic_lists_quantities() {
    let out = run(&["moments", "--lambda", "2", "--n", "2", "--format", "symbolic"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("moment_Y_2 = "));
    assert!(text.contains("moment_X_2 = "));
    assert!(text.contains("kappa_1 = "));
    assert!(text.contains("kappa_2 = "));
    assert!(text.contains("exp("));
}

#[test]
fn moments_json_parses() {
    let out = run(&[
        "moments", "--lambda", "7/3", "--n", "4", "--t-stop", "2", "--format", "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let rows = rows.as_array().expect("array");
    assert_eq!(rows.len(), 5);
    let first = rows[0].as_object().unwrap();
    assert!(first.contains_key("t"));
    assert!(first.contains_key("moment_X_4"));
    assert!(first.contains_key("kappa_4"));
    // t = 0: degenerate, skewness/kurtosis are null.
    assert!(first["skewness"].is_null());
    // t = 2: positive variance, shape ratios defined.
    let last = rows[4].as_object().unwrap();
    assert!(last["kurtosis"].is_number());
}

#[test]
fn moments_order_zero_is_constant_one() {
    let out = run(&["moments", "--lambda", "2", "--n", "0", "--t-stop", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "t,moment_Y_0,moment_X_0,skewness,kurtosis"
    );
    for row in text.lines().skip(1) {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[1], "1.0000000000000000e0");
        assert_eq!(cells[2], "1.0000000000000000e0");
    }
}

#[test]
fn moments_rational_lambda_is_exact() {
    // 7/3 and its decimal expansion differ; the rational must be exact.
    let exact = run(&["moments", "--lambda", "7/3", "--n", "1", "--format", "symbolic"]);
    let text = stdout(&exact);
    assert!(text.contains("-7/6"), "expected rate -7/6, got {text}");
    // Decimal input is parsed exactly as a fraction over a power of ten.
    let decimal = run(&["moments", "--lambda", "2.5", "--n", "1", "--format", "symbolic"]);
    assert!(stdout(&decimal).contains("-5/4"));
}

#[test]
fn moments_nonuniform_cutoff() {
    // Z with m_1 = 1/2, m_2 = 1/3 (uniform in disguise) matches uniform.
    let a = run(&["moments", "--lambda", "2", "--n", "2", "--cutoff", "1/2,1/3"]);
    let b = run(&["moments", "--lambda", "2", "--n", "2"]);
    assert_eq!(stdout(&a), stdout(&b));
    // Too short a list for the requested order is a config error.
    let short = run(&["moments", "--lambda", "2", "--n", "3", "--cutoff", "1/2,1/3"]);
    assert_eq!(short.status.code(), Some(2));
    // Invalid moment sequences are rejected.
    let rising = run(&["moments", "--lambda", "2", "--n", "2", "--cutoff", "1/3,1/2"]);
    assert_eq!(rising.status.code(), Some(2));
}

#[test]
fn embedded_csv_shape() {
    let out = run(&["embedded", "--lambda", "2", "--n", "2", "--m-stop", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "m,moment_Y_1,moment_Y_2,moment_X_1,moment_X_2,kappa_Y_1,kappa_Y_2,kappa_X_1,kappa_X_2,skewness_Y,kurtosis_Y,skewness_X,kurtosis_X"
    );
    assert_eq!(text.lines().count(), 5);
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("1,"));
    // E[Y(1)] = 1/4 at λ = 2.
    assert_eq!(first.split(',').nth(1).unwrap(), "2.5000000000000000e-1");
}

#[test]
fn embedded_symbolic_exact_rationals() {
    let out = run(&[
        "embedded", "--lambda", "2", "--n", "2", "--m-start", "2", "--m-stop", "2",
        "--format", "symbolic",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("m=2 moment_Y_1 = 5/8"), "got {text}");
    assert!(text.contains("m=2 moment_X_2 = 11/36"), "got {text}");
}

#[test]
fn embedded_rejects_out_of_range_orders() {
    let too_high = run(&["embedded", "--lambda", "2", "--n", "5"]);
    assert_eq!(too_high.status.code(), Some(2));
    let zero = run(&["embedded", "--lambda", "2", "--n", "0"]);
    assert_eq!(zero.status.code(), Some(2));
    let deep = run(&["embedded", "--lambda", "2", "--n", "2", "--m-stop", "31"]);
    assert_eq!(deep.status.code(), Some(2));
}

#[test]
fn compare_csv_shape_and_exit() {
    let out = run(&[
        "compare", "--lambda", "2", "--n", "2", "--samples", "5000",
        "--t-stop", "1",
    ]);
    assert!(out.status.success(), "gate should pass at 4 sigma");
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "grid,analytic,estimate,stderr,z");
    // Grid 0.5, 1.0 with kappa_1, kappa_2 each: 4 rows.
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("t=0.5/kappa_1"));
    assert!(text.contains("t=1/kappa_2"));
}

#[test]
fn compare_embedded_grid_labels() {
    let out = run(&[
        "compare", "--lambda", "2", "--n", "1", "--samples", "5000",
        "--m-start", "1", "--m-stop", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Y(m=1)/kappa_1"), "got {text}");
    assert!(text.contains("X(m=2)/kappa_1"), "got {text}");
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn compare_json_has_verdict() {
    let out = run(&[
        "compare", "--lambda", "2", "--n", "1", "--samples", "5000",
        "--t-stop", "0.5", "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(doc["sigma"], 4.0);
    assert_eq!(doc["pass"], true);
    assert!(doc["rows"].as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn compare_gate_failure_exits_one() {
    // A tiny sigma makes sampling noise exceed the gate: exit code 1.
    let out = run(&[
        "compare", "--lambda", "2", "--n", "4", "--samples", "2000",
        "--t-stop", "1", "--sigma", "0.01",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["compare", "--lambda", "0", "--samples", "100"],
        vec!["compare", "--lambda", "2", "--samples", "0"],
        vec!["compare", "--lambda", "2", "--samples", "100", "--format", "symbolic"],
        vec!["compare", "--lambda", "2", "--samples", "100", "--t-stop", "1", "--m-stop", "3"],
        vec!["compare", "--lambda", "2", "--samples", "100", "--sigma", "-1"],
        vec!["compare", "--lambda", "2", "--samples", "100", "--n", "0"],
        vec!["moments", "--lambda", "abc"],
        vec!["moments", "--lambda", "-2"],
        vec!["moments", "--lambda", "2", "--t-step", "0"],
        vec!["moments", "--lambda", "2", "--t-stop", "-1"],
        vec!["embedded", "--lambda", "2", "--cutoff", "garbage"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
    // Unknown flags are usage errors (clap convention: exit 2).
    let out = run(&["moments", "--lambda", "2", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("gc-moments-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    let out = run(&[
        "moments", "--lambda", "2", "--n", "1", "--t-stop", "1",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "file output should not print to stdout");
    let content = std::fs::read_to_string(&path).unwrap();
    assert!(content.starts_with("t,moment_Y_1"));
    assert!(content.ends_with('\n'));
    std::fs::remove_dir_all(&dir).ok();
    // Unwritable path is a config error.
    let bad = run(&[
        "moments", "--lambda", "2", "--n", "1",
        "--out", Path::new("/nonexistent-dir/x.csv").to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn embedded_compare_matches_exact_values() {
    // The analytic column in the compare output is the exact E-chain
    // cumulant; spot-check the first-moment row for m = 2 (E[Y(2)] = 5/8).
    let out = run(&[
        "compare", "--lambda", "2", "--n", "1", "--samples", "2000",
        "--m-start", "2", "--m-stop", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text
        .lines()
        .find(|l| l.starts_with("Y(m=2)/kappa_1"))
        .expect("row present");
    assert_eq!(row.split(',').nth(1).unwrap(), "6.2500000000000000e-1");
}
