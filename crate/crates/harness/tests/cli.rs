use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qucipher_harness::output::without_timestamp;

fn qucipher(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qucipher"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn estimate_defaults_and_config_embedding() {
    let out = qucipher(&["estimate", "--qubits", "8", "--bitrate", "50000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n_messages"], "65536");
    assert_eq!(v["config"]["qubits"], 8);
    assert!(v["generated_at"].is_string() || v["generated_at"].is_number());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qucipher(&["estimate", "--bogus"]).status.code(), Some(2));
    assert_eq!(qucipher(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qucipher(&["estimate", "--qubits", "0"]).status.code(), Some(2));
    assert_eq!(qucipher(&["tomo-scaling", "--estimator", "magic"]).status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "qubits = 3\nspeed = 9\n").unwrap();
    let out = qucipher(&["estimate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_cap_exits_3() {
    let out = qucipher(&["guess-attack", "--qubits", "2", "--gates", "8", "--cap", "1000"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(qucipher(&["roundtrip", "--qubits", "30"]).status.code(), Some(3));
}

#[test]
fn corrupted_key_is_an_acceptance_violation() {
    let out = qucipher(&["roundtrip", "--qubits", "2", "--keys", "5", "--corrupt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["failures"].as_u64().unwrap() > 0);
    assert_eq!(qucipher(&["roundtrip", "--qubits", "2", "--keys", "5"]).status.code(), Some(0));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# cost of an 8-qubit register\nqubits = 8\nbitrate = 1000  # slow link\n").unwrap();
    let path = cfg.to_str().unwrap();
    let from_file = json(&qucipher(&["estimate", "--config", path]));
    assert_eq!(from_file["config"]["qubits"], 8);
    assert_eq!(from_file["config"]["bitrate"], 1000.0);
    let overridden = json(&qucipher(&["estimate", "--config", path, "--qubits", "4"]));
    assert_eq!(overridden["config"]["qubits"], 4);
    assert_eq!(overridden["config"]["bitrate"], 1000.0);
}

#[test]
fn outputs_are_deterministic_up_to_timestamp() {
    let args = ["detect", "--qubits", "2", "--messages", "300", "--seed", "5"];
    let a = stdout(&qucipher(&args));
    let b = stdout(&qucipher(&args));
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
    let grid = ["tomo-scaling", "--seeds", "2", "--n-grid", "100,1000", "--seed", "3"];
    let a = stdout(&qucipher(&grid));
    let b = stdout(&qucipher(&grid));
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
}

#[test]
fn scaling_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("scaling.csv");
    let out = qucipher(&[
        "tomo-scaling", "--seeds", "2", "--n-grid", "100,1000", "--out", file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&file).unwrap();
    assert!(!text.contains('\r'));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "K,N,seed,alpha");
    assert_eq!(data.len(), 1 + 2 * 2);
    for row in &data[1..] {
        let alpha: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!(alpha > 0.0);
    }
    assert!(text.lines().any(|l| l.starts_with("# slope")));
}

fn keygen(dir: &Path, args: &[&str]) -> String {
    let file = dir.join("key.txt");
    let mut all = vec!["keygen", "--out", file.to_str().unwrap()];
    all.extend_from_slice(args);
    assert_eq!(qucipher(&all).status.code(), Some(0));
    file.to_str().unwrap().to_string()
}

#[test]
fn key_file_drives_guess_attack() {
    let dir = tempfile::tempdir().unwrap();
    let key = keygen(dir.path(), &["--qubits", "1", "--gates", "2", "--seed", "4"]);
    let text = fs::read_to_string(&key).unwrap();
    let lib = qucipher::GateLibrary::default_for(1).unwrap();
    assert_eq!(qucipher::read_key_file(&lib, &text).unwrap().sequence().len(), 2);
    let out = qucipher(&["guess-attack", "--qubits", "1", "--gates", "2", "--key-file", &key]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["found"], true);
    assert_eq!(v["keyspace"], "49");
    assert_eq!(v["decodes_like_true_key"], true);
}

#[test]
fn detect_writes_transcript_lines() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("session.jsonl");
    let out = qucipher(&[
        "detect", "--qubits", "2", "--messages", "50", "--strategy", "passive", "--transcript",
        log.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "clean");
    let text = fs::read_to_string(&log).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l.is_object()));
}

#[test]
fn intercept_resend_session_aborts() {
    let out = qucipher(&["detect", "--qubits", "3", "--strategy", "resend-z", "--seed", "2"]);
    let v = json(&out);
    if v["analytic_error_rate"].as_f64().unwrap() > 0.05 {
        assert_eq!(v["verdict"], "abort");
        assert_eq!(out.status.code(), Some(0));
    }
}
