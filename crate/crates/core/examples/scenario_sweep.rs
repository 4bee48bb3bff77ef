//! A small `--set` style sweep driven through the scenario API: the lax
//! scenario at several spectral parameters.

use slowlight::scenario::{run_scenario, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for delta in ["5", "20", "80", "-20"] {
        let cfg = ScenarioConfig::from_json_with_overrides(
            "",
            &["scenario=lax".into(), format!("lax.spectral={delta}")],
        )?;
        let out = run_scenario(&cfg)?;
        let slope = out.report.check("zero_curvature_loglog_slope").unwrap();
        println!("spectral {delta:>4} MHz: slope {:.3} pass={} ({})", slope.value, out.report.pass, &out.report.config_sha256[..12]);
    }
    Ok(())
}
