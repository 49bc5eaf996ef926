//! The binary's exit codes, overrides and output formats.

use fracbubble::cli::config::RunConfig;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracbubble"))
}

fn write_config(dir: &Path, cfg: &RunConfig) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    path
}

#[test]
fn passing_suite_exits_zero_and_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = bin().args(["reduce", "--out"]).arg(&out).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("reduce.csv")).unwrap();
    assert!(csv.starts_with("quantity,value_est,"), "{csv}");
    // Floats carry 17 significant digits.
    let r_star = csv.lines().find(|l| l.starts_with("r_star,")).unwrap();
    let value = r_star.split(',').nth(1).unwrap();
    let mantissa = value.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{value}");
    assert!(out.join("reduce.json").exists());
    assert!(out.join("reduce_scaling.svg").exists());
}

#[test]
fn failing_check_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig { out_dir: tmp.path().join("out"), ..RunConfig::default() };
    // At k = 4 the leading-order lattice form is far outside 2%.
    cfg.lattice.check_k = 4;
    let path = write_config(tmp.path(), &cfg);
    let output = bin().arg("lattice").arg("--config").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("FAIL lattice_same_side "), "{stdout}");
    assert!(String::from_utf8_lossy(&output.stderr).contains("failed checks: lattice_same_side"));
}

#[test]
fn invalid_configuration_exits_two_with_field_path() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.json");
    std::fs::write(&path, r#"{"N": 6, "s": 0.9, "mc": {"n_samples": 10}}"#).unwrap();
    let output = bin().arg("constants").arg("--config").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("`mc`"));

    std::fs::write(&path, r#"{"regime": {"l0": 3.0, "l1": 2.0}}"#).unwrap();
    let output = bin().arg("constants").arg("--config").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(2));

    let missing = bin().args(["constants", "--config", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let suite_on_single = bin().args(["constants", "--suite", "lattice"]).output().unwrap();
    assert_eq!(suite_on_single.status.code(), Some(2));
    let unknown_suite = bin().args(["all", "--suite", "constants,bogus"]).output().unwrap();
    assert_eq!(unknown_suite.status.code(), Some(2));
    let unknown_command = bin().arg("everything").output().unwrap();
    assert_eq!(unknown_command.status.code(), Some(2));
}

#[test]
fn all_writes_manifest_with_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = bin()
        .args(["all", "--suite", "constants,reduce", "--seed", "99", "--out"])
        .arg(&out)
        .env("FRACBUBBLE_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 99);
    assert_eq!(manifest["suites"], serde_json::json!(["constants", "reduce"]));
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    let record: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("run_record.json")).unwrap()).unwrap();
    assert_eq!(record["passed"], true);
    for f in ["constants.csv", "bubble_identity.csv", "reduce.csv", "reduce_scaling.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(!out.join("lattice.csv").exists());
}
