//! Zero-curvature residual of the Lax pair on the closed-form history,
//! with a corrupted field as control.

use slowlight::analytic::{BackgroundField, SolitonParams, SolitonSolution};
use slowlight::lax::{zero_curvature_residual, AnalyticHistory};
use slowlight::{DetuningDistribution, MediumProfile, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SolitonParams::figure1();
    let nu = DetuningDistribution::sharp_line();
    let g = 50.0;
    let w = p.tau_width(0.25);
    let wz = p.zeta_width(g, &nu);
    let bg = BackgroundField::constant(C64::new(0.5, 0.0), -12.0 * w, 12.0 * w, 4096)?;
    let medium = MediumProfile::uniform(g, 4.0 * wz)?;
    let sol = SolitonSolution::new(p, &bg, &medium, &nu);
    let tc = sol.center_tau(wz).unwrap();
    let points: Vec<_> = [-1.0, 0.0, 1.0].iter().map(|k| (tc + k * w, wz)).collect();
    let clean = AnalyticHistory::new(sol.clone(), &medium);
    let bad = AnalyticHistory::new(sol.clone(), &medium).corrupted(1.01);
    for f in [0.4, 0.2, 0.1, 0.05] {
        let r = zero_curvature_residual(&clean, 20.0, &points, f * w, f * wz)?;
        let rb = zero_curvature_residual(&bad, 20.0, &points, f * w, f * wz)?;
        println!("h = {f:>5} W: residual {:.3e}   corrupted {:.3e}", r.max_residual, rb.max_residual);
    }
    Ok(())
}
