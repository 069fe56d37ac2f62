use std::path::Path;
use std::process::Command;

use ptcool::config::{load_config, parse_config};
use ptcool::sweep::{run_sweep, SweepSpec};

const SPEC: &str = r#"{
    "id": "j_scan",
    "axis": {"name": "j", "unit": "gamma"},
    "grid": {"start": 0.1, "stop": 0.6, "points": 6, "scale": "linear"},
    "observables": ["a_minus", "stability_margin"],
    "case": "P-P"
}"#;

fn ptcool(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ptcool"))
        .args(args)
        .current_dir(dir)
        .env_remove("PTCOOL_CONFIG")
        .output()
        .expect("binary runs")
}

#[test]
fn config_file_matches_inline_text() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"case": "S-C", "g_lin_over_gamma": 0.015, "n_th": 65}"#;
    let path = dir.path().join("c.json");
    std::fs::write(&path, text).unwrap();
    let a = load_config(&path).unwrap();
    let b = parse_config(text).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(a.thermal, b.thermal);
}

#[test]
fn sweep_is_deterministic_and_written() {
    let config = parse_config("{}").unwrap();
    let spec = SweepSpec::from_json(SPEC).unwrap();
    let a = run_sweep(&spec, &config).unwrap();
    let b = run_sweep(&spec, &config).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.flags, b.flags);

    let dir = tempfile::tempdir().unwrap();
    let (csv, json) = a.write_to(dir.path()).unwrap();
    let body = std::fs::read_to_string(csv).unwrap();
    assert_eq!(body.lines().count(), 7);
    assert!(body.starts_with("j[gamma],a_minus,stability_margin,flags"));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert!(meta.get("timestamp").is_some());
}

#[test]
fn cli_sweep_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("spec.json"), SPEC).unwrap();
    let out = ptcool(&["sweep", "spec.json", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("o/j_scan.csv").exists());

    let out = ptcool(&["figure", "fig3", "--out", "o"], dir.path());
    assert!(out.status.success());
    assert!(dir.path().join("o/fig3.json").exists());
}

#[test]
fn cli_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"gama_hz": 1}"#).unwrap();
    let out = ptcool(&["--config", "bad.json", "figure", "fig2a"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = ptcool(&["figure", "fig9"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cli_config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"case": "S-C"}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ptcool"))
        .args(["figure", "fig2a", "--out", "o"])
        .current_dir(dir.path())
        .env("PTCOOL_CONFIG", "c.json")
        .output()
        .unwrap();
    assert!(out.status.success());
}
