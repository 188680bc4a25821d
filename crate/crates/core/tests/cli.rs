//! End-to-end tests of the `sgh` binary: exit-code contract, report files,
//! and the trace CSV format.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sgh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const NEGATION: &str = r#"{
    "space": {"n": 1, "p": 2.0},
    "domain": {"kind": "whole-space"},
    "mapping": {"kind": "negation"},
    "params": {"named": "nonexpansive"},
    "fixed_points": [[0.0]],
    "sampling": {"seed": 42},
    "scheme": "ishikawa",
    "schedules": {"lambda": {"family": "constant", "value": 0.5},
                  "gamma": {"family": "constant", "value": 0.5}},
    "x0": [1.0]
}"#;

const DOUBLING: &str = r#"{
    "space": {"n": 1, "p": 2.0},
    "domain": {"kind": "whole-space"},
    "mapping": {"kind": "scaling", "factor": 2.0},
    "params": {"named": "nonexpansive"},
    "fixed_points": [[0.0]],
    "sampling": {"seed": 42},
    "fit": {"impose_c1": true, "impose_c3": true}
}"#;

#[test]
fn check_class_passes_on_negation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "neg.json", NEGATION);
    let out = sgh(&["check-class", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("check-class-report.json")).unwrap())
            .unwrap();
    assert_eq!(report["all_pass"], serde_json::Value::Bool(true));
    assert_eq!(report["membership"]["member"], serde_json::Value::Bool(true));
    assert_eq!(report["conditions"]["c1"], serde_json::Value::Bool(true));
}

#[test]
fn check_class_fails_on_doubling() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "dbl.json", DOUBLING);
    let out = sgh(&["check-class", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn malformed_config_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.json", "{not json");
    let out = sgh(&["check-class", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let missing = sgh(&["check-class", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn fit_cone_identity_feasible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "id.json",
        &NEGATION.replace(r#""kind": "negation""#, r#""kind": "identity""#),
    );
    let out = sgh(&["fit-cone", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("fit-cone-report.json")).unwrap())
            .unwrap();
    assert_eq!(report["outcome"]["feasible"], serde_json::Value::Bool(true));
    assert_eq!(
        report["membership_recheck"]["member"],
        serde_json::Value::Bool(true)
    );
}

#[test]
fn fit_cone_conditioned_doubling_infeasible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "dbl.json", DOUBLING);
    let out = sgh(&["fit-cone", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("fit-cone-report.json")).unwrap())
            .unwrap();
    assert_eq!(report["outcome"]["feasible"], serde_json::Value::Bool(false));
}

#[test]
fn iterate_writes_halving_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "neg.json", NEGATION);
    let out_dir = tmp.path().join("run");
    let out = sgh(&["iterate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let csv = fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,x0,residual,dist0");
    // geometrically halving distance column
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    for w in rows.windows(2) {
        assert_eq!(w[1][3], w[0][3] / 2.0, "distance halves each step");
    }

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("iterate-report.json")).unwrap())
            .unwrap();
    assert_eq!(report["stop_reason"], "residual-tolerance");
    assert_eq!(report["hypotheses_satisfied"], serde_json::Value::Bool(true));
    assert_eq!(report["all_pass"], serde_json::Value::Bool(true));
}

#[test]
fn iterate_identity_single_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "id.json",
        &NEGATION
            .replace(r#""kind": "negation""#, r#""kind": "identity""#)
            .replace(r#""fixed_points": [[0.0]],"#, r#""fixed_points": [[1.0]],"#),
    );
    let out_dir = tmp.path().join("run");
    let out = sgh(&["iterate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2, "header plus a single row");
}

#[test]
fn iterate_flags_hypothesis_violation_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "stall.json",
        &NEGATION.replace(
            r#""lambda": {"family": "constant", "value": 0.5}"#,
            r#""lambda": {"family": "harmonic-offset", "base": 0.0, "amplitude": 1.0}"#,
        ),
    );
    let out_dir = tmp.path().join("run");
    let out = sgh(&["iterate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("iterate-report.json")).unwrap())
            .unwrap();
    assert_eq!(report["hypotheses_satisfied"], serde_json::Value::Bool(false));
    assert_eq!(
        report["schedule_verdicts"]["lambda"]["liminf_product_positive"],
        serde_json::Value::Bool(false)
    );
    // the run still executes and stays Fejer monotone
    assert!(report["iterations"].as_u64().unwrap() > 0);
    assert_eq!(report["fejer"][0]["pass"], serde_json::Value::Bool(true));
}

#[test]
fn iterate_seed_override_changes_echo() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "neg.json", NEGATION);
    let out = sgh(&["check-class", "--config", &cfg, "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["config"]["sampling"]["seed"], serde_json::json!(7));
}

#[test]
fn verify_theorems_unknown_suite_exits_one() {
    let out = sgh(&["verify-theorems", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_theorems_single_suite_passes() {
    let out = sgh(&["verify-theorems", "--suite", "negative-controls"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("negative-controls"));
    assert!(text.contains("PASS"));
}
