//! Launches the closed-form pulse into the medium, marches the full
//! Maxwell-Liouville system and compares with the closed form at the end.
//!
//!     cargo run --release --example oracle [n_tau] [n_zeta]

use slowlight::analytic::{launch_pulse, BackgroundField, SolitonParams, SolitonSolution};
use slowlight::dynamics::{analyze_history, propagate, InitialAtoms, MarchSpec};
use slowlight::{DetuningDistribution, MediumProfile, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = |i: usize, d: usize| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (n_tau, n_zeta) = (arg(1, 1024), arg(2, 64));
    let g = 50.0;
    let nu = DetuningDistribution::sharp_line();
    let base = SolitonParams::figure1();
    let w = base.tau_width(0.25);
    let wz = base.zeta_width(g, &nu);
    // start 1.5 widths early so the soliton ends 1.5 widths late
    let params = base.with_q0(-1.5);
    let bg = BackgroundField::constant(C64::new(0.5, 0.0), -12.0 * w, 12.0 * w, n_tau)?;
    let medium = MediumProfile::uniform(g, 6.0 * wz)?;
    let spec = MarchSpec::new(n_zeta, 3.0 * wz);

    let t = std::time::Instant::now();
    let prop = propagate(&launch_pulse(&params, &bg), &medium, &nu, InitialAtoms::DarkOfField, &spec)?;
    println!("marched {n_tau} x {n_zeta} in {:.2} s ({} substeps)", t.elapsed().as_secs_f64(), prop.substeps);

    let sol = SolitonSolution::new(params, &bg, &medium, &nu);
    let zl = *prop.fields.zeta.last().unwrap();
    let err = prop
        .fields
        .last_slice()
        .iter()
        .zip(sol.field_slice(zl))
        .map(|(a, b)| (a.p - b.p).norm().max((a.m - b.m).norm()))
        .fold(0.0, f64::max);
    println!("max |Omega_pde - Omega_exact| / |Omega| at zeta = {zl:.3} us: {:.3e}", err / 0.5);

    let rep = analyze_history(&prop.fields, &prop.atoms, &nu, &medium)?;
    println!("tracked v/c = {:.5e}   closed form = {:.5e}", rep.v_over_c.unwrap_or(f64::NAN), 0.25 / (2.0 * g));
    if let Some(c) = rep.conservation {
        println!("conservation residual / peak flux gradient = {:.3e}", c.relative);
    }
    println!("max norm drift {:.1e}, max |psi_e|^2 {:.3e}", rep.max_norm_drift, rep.max_excited_population);
    Ok(())
}
