use slowlight::scenario::{
    run_scenario, run_with_threads, write_output, OutputFormat, ScenarioConfig, ScenarioKind, FIGURE1_HEADER,
};

fn small(kind: ScenarioKind) -> ScenarioConfig {
    ScenarioConfig::from_json_with_overrides(
        "",
        &[
            format!("scenario={kind}"),
            "grid.n_tau=1024".into(),
            "grid.n_zeta=64".into(),
        ],
    )
    .unwrap()
}

#[test]
fn figure1_csv_shape() {
    let cfg = ScenarioConfig::for_scenario(ScenarioKind::Figure1);
    let out = run_scenario(&cfg).unwrap();
    let csv = out.artifact("figure1_strip.csv").unwrap().text().to_string();
    let mut lines = csv.lines();
    let prov = lines.next().unwrap();
    assert!(prov.starts_with("# slowlight"));
    assert!(prov.contains(&cfg.hash()));
    assert_eq!(lines.next().unwrap(), FIGURE1_HEADER);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), cfg.grid.n_tau);
    for r in &rows {
        let v: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v.len(), 10);
        // s0 is the total intensity.
        assert!((v[6] - 0.25).abs() < 1e-12);
    }
    assert!(out.report.pass);
}

#[test]
fn figure1_json_has_the_same_rows() {
    let mut cfg = ScenarioConfig::for_scenario(ScenarioKind::Figure1);
    cfg.grid.n_tau = 101;
    cfg.output.format = OutputFormat::Json;
    let out = run_scenario(&cfg).unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&out.artifact("figure1_strip.json").unwrap().bytes).unwrap();
    assert_eq!(doc["data"].as_array().unwrap().len(), 101);
    assert!(doc["provenance"].as_str().unwrap().contains("scenario=figure1"));
}

#[test]
fn same_config_gives_identical_bytes() {
    for kind in [ScenarioKind::Figure1, ScenarioKind::Lax, ScenarioKind::Feasibility, ScenarioKind::Modes] {
        let cfg = ScenarioConfig::for_scenario(kind);
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert_eq!(a, b, "{kind}");
    }
}

#[test]
fn thread_count_does_not_change_the_march() {
    let mut cfg = small(ScenarioKind::StopRetrieve);
    cfg.stop_retrieve.holds = vec![20.0, 40.0];
    let one = run_with_threads(&cfg, Some(1)).unwrap();
    let four = run_with_threads(&cfg, Some(4)).unwrap();
    assert_eq!(one.artifacts, four.artifacts);
    assert_eq!(one.report, four.report);
}

#[test]
fn report_hash_tracks_the_config() {
    let a = ScenarioConfig::for_scenario(ScenarioKind::Lax);
    let mut b = a.clone();
    b.lax.spectral = 25.0;
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash(), ScenarioConfig::from_json(&a.to_json()).unwrap().hash());
}

#[test]
fn overrides_and_bad_keys() {
    let cfg = ScenarioConfig::from_json_with_overrides(
        r#"{"scenario": "lax", "grid": {"n_tau": 2048}}"#,
        &["grid.n_zeta=32".into(), "lax.offsets_widths=[0,1]".into()],
    )
    .unwrap();
    assert_eq!(cfg.scenario, ScenarioKind::Lax);
    assert_eq!(cfg.grid.n_tau, 2048);
    assert_eq!(cfg.grid.n_zeta, 32);
    assert_eq!(cfg.lax.offsets_widths, vec![0.0, 1.0]);
    assert!(ScenarioConfig::from_json(r#"{"gird": {}}"#).is_err());
    assert!(ScenarioConfig::from_json_with_overrides("", &["grid.n_tau".into()]).is_err());
}

#[test]
fn failing_threshold_writes_failure_json() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::for_scenario(ScenarioKind::Figure1);
    cfg.figure1.intensity_tolerance = 0.0;
    let out = run_scenario(&cfg).unwrap();
    assert!(!out.report.pass);
    assert_eq!(out.exit_code(), 1);
    let written = write_output(&out, dir.path()).unwrap();
    assert!(written.iter().any(|p| p.ends_with("failure.json")));
    let fail: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("failure.json")).unwrap()).unwrap();
    assert_eq!(fail["failed_checks"][0]["name"], "intensity_identity_rel");
}

#[test]
fn stop_retrieve_small_grid_reports_positions() {
    let mut cfg = small(ScenarioKind::StopRetrieve);
    cfg.stop_retrieve.holds = vec![20.0, 40.0];
    let out = run_scenario(&cfg).unwrap();
    for name in ["retrieval_vs_accumulated_intensity", "hold_time_independence"] {
        let c = out.report.check(name).unwrap();
        assert!(c.pass, "{c}");
    }
    assert!(out.artifact("stop_retrieve_track.csv").is_some());
}
