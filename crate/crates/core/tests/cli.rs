use std::path::Path;
use std::process::{Command, Output};

fn slowlight(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slowlight"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

#[test]
fn passing_verb_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowlight(&["feasibility"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("PASS loss_formula_rel_error"));
    assert!(dir.path().join("report.json").exists());
    assert!(dir.path().join("feasibility.csv").exists());
    assert!(!dir.path().join("failure.json").exists());
}

#[test]
fn failed_threshold_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowlight(&["figure1", "--set", "figure1.intensity_tolerance=0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL intensity_identity_rel"));
    let fail: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("failure.json")).unwrap()).unwrap();
    assert_eq!(fail["scenario"], "figure1");
    assert!(fail["error"].is_null());
}

#[test]
fn runtime_error_exits_two_with_failure_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowlight(&["lax", "--set", "lax.spectral=0"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));
    let fail: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("failure.json")).unwrap()).unwrap();
    assert!(!fail["error"].as_str().unwrap().is_empty());
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowlight(&["figure1", "--set", "grid.no_such_key=1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = slowlight(&["figure1", "--format", "xml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn print_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowlight(&["modes", "--set", "modes.n_tau=4001", "--print-config"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let cfg = slowlight::scenario::ScenarioConfig::from_json(&String::from_utf8_lossy(&o.stdout)).unwrap();
    assert_eq!(cfg.modes.n_tau, 4001);
    assert_eq!(cfg.scenario, slowlight::scenario::ScenarioKind::Modes);

    let path = dir.path().join("cfg.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let again = Command::new(env!("CARGO_BIN_EXE_slowlight"))
        .args(["modes", "--print-config", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn json_format_writes_json_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowlight(&["figure1", "--format", "json", "--set", "grid.n_tau=101"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("figure1_strip.json").exists());
}
