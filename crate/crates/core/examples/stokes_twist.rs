//! Polarization twist against the spectral angle. The deepest s3/s0 follows
//! cos(2 theta), so the opposite pole is reached only at theta = pi/2.

use slowlight::analytic::{stokes_of, BackgroundField, SolitonParams, SolitonSolution};
use slowlight::{DetuningDistribution, MediumProfile, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nu = DetuningDistribution::sharp_line();
    let medium = MediumProfile::uniform(50.0, 1.0)?;
    for k in 1..=7 {
        let theta = k as f64 * std::f64::consts::PI / 8.0;
        let p = SolitonParams::from_polar(10.0, theta, 0.0, 0.0)?;
        let w = p.tau_width(0.25);
        let bg = BackgroundField::constant(C64::new(0.5, 0.0), -15.0 * w, 15.0 * w, 6001)?;
        let sol = SolitonSolution::new(p, &bg, &medium, &nu);
        let min_s3 = sol
            .field_slice(0.0)
            .iter()
            .map(|f| stokes_of(f).direction()[2])
            .fold(f64::INFINITY, f64::min);
        println!("theta = {:.3} pi: min s3/s0 = {min_s3:+.6}", p.theta() / std::f64::consts::PI);
    }
    Ok(())
}
