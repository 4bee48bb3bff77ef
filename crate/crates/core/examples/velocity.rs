//! Slow-light velocity: tracked soliton centre against |Omega|^2 / (2g).

use slowlight::analytic::{launch_pulse, soliton_velocity, BackgroundField, SolitonParams};
use slowlight::dynamics::{propagate, track_soliton, InitialAtoms, MarchSpec};
use slowlight::dynamics::analysis::fit_slope;
use slowlight::{DetuningDistribution, MediumProfile, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nu = DetuningDistribution::sharp_line();
    for &(omega, g) in &[(0.5, 50.0), (0.5, 100.0), (0.7, 50.0)] {
        let p = SolitonParams::figure1();
        let w = p.tau_width(omega * omega);
        let wz = p.zeta_width(g, &nu);
        let bg = BackgroundField::constant(C64::new(omega, 0.0), -12.0 * w, 12.0 * w, 1024)?;
        let medium = MediumProfile::uniform(g, 6.0 * wz)?;
        let launch = launch_pulse(&p.with_q0(-1.5), &bg);
        let spec = MarchSpec::new(64, 3.0 * wz).without_atoms();
        let prop = propagate(&launch, &medium, &nu, InitialAtoms::DarkOfField, &spec)?;
        let track = track_soliton(&prop.fields)?;
        let slope = fit_slope(&track.zeta, &track.tau_center).unwrap();
        let v = 1.0 / (1.0 + slope);
        let expect = soliton_velocity(&p, g, &nu, omega * omega)?;
        println!(
            "|Omega| = {omega}, g = {g}: v/c = {v:.5e}, closed form {expect:.5e}, rel diff {:.2e}",
            (v - expect).abs() / expect
        );
    }
    Ok(())
}
