//! Closed-form soliton at |Omega| = 0.5 MHz, xi + i eta = 10 exp(0.4 i pi): a coarse
//! Stokes-vector strip over the soliton, printed as a table.
//!
//!     cargo run --release --example figure1 [strip.csv]

use std::io::Write;

use slowlight::analytic::{stokes_of, BackgroundField, SolitonParams, SolitonSolution};
use slowlight::{DetuningDistribution, MediumProfile, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = SolitonParams::figure1();
    let omega = C64::new(0.5, 0.0);
    let w = params.tau_width(omega.norm_sqr());
    let bg = BackgroundField::constant(omega, -20.0 * w, 20.0 * w, 4096)?;
    let medium = MediumProfile::uniform(50.0, 1.0)?;
    let nu = DetuningDistribution::sharp_line();
    let sol = SolitonSolution::new(params, &bg, &medium, &nu);

    println!("theta = {:.4} pi, tau width W = {w:.2} us", params.theta() / std::f64::consts::PI);
    println!("{:>9} {:>8} {:>8} {:>8} {:>8}", "x/l_s", "s1/s0", "s2/s0", "s3/s0", "|Om|^2");
    for k in -8..=8 {
        let tau = -0.5 * k as f64 * w;
        let f = sol.field(tau, 0.0)?;
        let d = stokes_of(&f).direction();
        println!("{:>9.2} {:>8.4} {:>8.4} {:>8.4} {:>8.5}", 0.5 * k as f64, d[0], d[1], d[2], f.intensity());
    }

    if let Some(path) = std::env::args().nth(1) {
        let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(out, "tau_us,zeta_us,re_omega_p,im_omega_p,re_omega_m,im_omega_m,s0,s1,s2,s3")?;
        for (i, f) in sol.field_slice(0.0).iter().enumerate() {
            let s = stokes_of(f);
            writeln!(
                out,
                "{:e},0,{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                bg.tau(i), f.p.re, f.p.im, f.m.re, f.m.im, s.s0, s.s1, s.s2, s.s3
            )?;
        }
        println!("wrote {path}");
    }
    Ok(())
}
