use std::fs;
use std::process::{Command, Output};

fn fiberloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fiberloop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn error_line(output: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&output.stderr);
    let last = stderr.lines().last().expect("an error line");
    serde_json::from_str(last).expect("error line is JSON")
}

#[test]
fn loss_sweep_writes_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("loss.csv");
    let output = fiberloop(&[
        "loss-sweep",
        "--m",
        "2:3:1",
        "--eta-f",
        "0.9,1",
        "--iterations",
        "20",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert!(output.stdout.is_empty());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("[4/4] loss-similarity"));
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("experiment,m,loops,eta_f,eta_s,"));
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "jitter-sweep",
        "--m",
        "1:2:1",
        "--sigma",
        "0:1:0.5",
        "--iterations",
        "25",
        "-q",
    ];
    let a = fiberloop(&args);
    let b = fiberloop(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stderr.is_empty());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    fs::write(
        &config,
        r#"{"experiment": "mismatch-delta", "m": [2, 3], "delta": "0:0.5:0.5", "iterations": 10, "master_seed": 1}"#,
    )
    .unwrap();
    let output = fiberloop(&[
        "mismatch-sweep",
        "--config",
        config.to_str().unwrap(),
        "--m",
        "2",
        "--seed",
        "8",
        "--format",
        "json",
        "-q",
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let records = json["records"].as_array().unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0]["seed"], 8);
    assert_eq!(records[0]["trials"], 10);
    assert_eq!(json["config"]["master_seed"], 8);
}

#[test]
fn loss_switch_experiment_is_selectable() {
    let output = fiberloop(&[
        "loss-sweep",
        "--experiment",
        "loss-switch",
        "--eta-f",
        "1",
        "--eta-s",
        "0.9,1",
        "--iterations",
        "5",
        "-q",
    ]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("loss-switch,3,2,"));

    let wrong = fiberloop(&["loss-sweep", "--experiment", "jitter-sigma"]);
    assert_eq!(wrong.status.code(), Some(2));
    assert_eq!(error_line(&wrong)["error"]["kind"], "config");
}

#[test]
fn errors_are_machine_readable() {
    let empty = fiberloop(&["loss-sweep", "--eta-f", "1:0.5:0.1"]);
    assert_eq!(empty.status.code(), Some(2));
    assert_eq!(error_line(&empty)["error"]["kind"], "usage");

    let bad_eta = fiberloop(&["loss-sweep", "--eta-f", "1.5", "-q"]);
    assert_eq!(bad_eta.status.code(), Some(2));
    let line = error_line(&bad_eta);
    assert_eq!(line["error"]["kind"], "config");
    assert!(line["error"]["message"].as_str().unwrap().contains("1.5"));

    let missing = fiberloop(&["dump-map", "--config", "/definitely/not/here.json"]);
    assert_ne!(missing.status.code(), Some(0));
    assert_eq!(error_line(&missing)["error"]["kind"], "io");

    let unwritable = fiberloop(&["dump-map", "--out", "/definitely/not/here/out.json", "-q"]);
    assert_eq!(unwritable.status.code(), Some(1));
    assert_eq!(error_line(&unwritable)["error"]["kind"], "io");
}

#[test]
fn dump_map_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("maps.json");
    let output = fiberloop(&[
        "dump-map",
        "--m",
        "2",
        "--loops",
        "2",
        "--eta-f",
        "0.9",
        "--eta-s",
        "0.95",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
        "-q",
    ]);
    assert!(output.status.success());
    let dump =
        fiberloop::sweep::MapDump::from_json_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(dump.loops, 2);
    assert_eq!(dump.v.len(), 2);
    let eta: f64 = 0.9 * 0.95;
    let expected = 0.95f64.powi(2) * eta.powi(3);
    assert!((dump.loss_matrix.re[0][1] - expected).abs() < 1e-15);
}

#[test]
fn validate_passes_and_reports_json() {
    let output = fiberloop(&["validate", "--format", "json", "--seed", "3"]);
    assert!(output.status.success());
    let checks: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let checks = checks.as_array().unwrap();
    assert_eq!(checks.len(), 10);
    assert!(checks.iter().all(|c| c["passed"] == true));
}
