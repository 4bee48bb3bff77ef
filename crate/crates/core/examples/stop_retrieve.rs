//! Switches the control off for a while and back on. The retrieved soliton
//! sits where the accumulated intensity says, whatever the hold time.
//!
//!     cargo run --release --example stop_retrieve

use slowlight::scenario::run::run_hold;
use slowlight::scenario::{ScenarioConfig, ScenarioKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ScenarioConfig::for_scenario(ScenarioKind::StopRetrieve);
    cfg.grid.n_tau = 1024;
    cfg.grid.n_zeta = 64;
    for hold in [0.0, 50.0, 100.0] {
        let (run, _) = run_hold(&cfg, hold)?;
        println!(
            "hold {hold:>5} us: centre {:>8.2} -> {:>8.2} us, accumulated {:.4} (predicted {:.4}), ground drift in dark {:.2e}",
            run.tau_center_start, run.tau_center_end, run.accumulated, run.predicted, run.frozen_drift
        );
    }
    Ok(())
}
