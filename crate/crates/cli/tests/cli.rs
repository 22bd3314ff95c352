use std::fs;
use std::process::{Command, Output};

use rigidity_core::report::{parse_report, Status};

fn rigidity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn model_table_csv() {
    let out = rigidity(&["model-table", "--a", "-1", "--n", "3", "--r-max", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,f_a,lambda_a,A_a,V_a"));
    assert_eq!(lines.count(), 512);
}

#[test]
fn violation_exits_one() {
    // a tolerance below rounding level turns λf = f' into a violation
    let out = rigidity(&["model-table", "--a", "-1", "--tol", "1e-300"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        &["curvature", "--grid", "4"][..],
        &["curvature", "--profile", "bogus"],
        &["model-table", "--output", "xml"],
        &["rigidity-classify"],
        &["no-such-command"],
    ] {
        let out = rigidity(args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unmet_hypothesis_exits_three() {
    let out = rigidity(&["pinch-verify", "--profile", "perturbed:sinh:0.01:3", "--a", "-1", "--n", "3"]);
    assert_eq!(code(&out), 3);
    let out = rigidity(&["theorem-b", "--profile", "sin", "--a", "-1", "--radius", "1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn fuzz_and_counterexample_pass() {
    let out = rigidity(&["lemma1-fuzz", "--n-max", "8", "--trials", "20000", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let out = rigidity(&["counterexample", "--output", "json"]);
    assert_eq!(code(&out), 0);
    let report = parse_report(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let tb = report.check("theorem_b_check").unwrap();
    assert_eq!(tb.verdict, Status::Pass);
    assert!(tb.hypothesis_failures[0].contains("upper curvature bound"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.cfg");
    fs::write(&cfg, "# model table\na = 0\nn = 2\nr-max = 2\ngrid = 16\noutput = json\n").unwrap();
    let out_path = dir.path().join("report.json");
    let out = rigidity(&[
        "model-table",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "3",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let report = parse_report(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report.config.n, 3);
    assert_eq!(report.config.a, 0.0);
    assert_eq!(report.config.grid, 16);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["lemma1-fuzz", "--trials", "3000", "--seed", "11", "--output", "json"][..],
        &["pinch-verify", "--profile", "sinh", "--grid", "64"],
        &["counterexample", "--dump"],
    ] {
        let a = rigidity(args);
        let b = rigidity(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
