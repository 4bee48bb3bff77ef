//! Inhomogeneous broadening: closed-form velocity for Gaussian and
//! Lorentzian lines against the sharp line, plus one broadened PDE run.

use slowlight::analytic::{launch_pulse, soliton_velocity, BackgroundField, SolitonParams};
use slowlight::dynamics::analysis::fit_slope;
use slowlight::dynamics::{propagate, track_soliton, InitialAtoms, MarchSpec};
use slowlight::{DetuningDistribution, LineShape, MediumProfile, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SolitonParams::figure1();
    let g = 50.0;
    let sharp = soliton_velocity(&p, g, &DetuningDistribution::sharp_line(), 0.25)?;
    for width in [0.5, 2.0, 5.0, 10.0] {
        let gauss = DetuningDistribution::new(LineShape::Gaussian { width }, 15)?;
        let lor = DetuningDistribution::new(LineShape::Lorentzian { width }, 201)?;
        println!(
            "width {width:>4} MHz: v/v_sharp gaussian {:.5}, lorentzian {:.5}",
            soliton_velocity(&p, g, &gauss, 0.25)? / sharp,
            soliton_velocity(&p, g, &lor, 0.25)? / sharp
        );
    }

    let nu = DetuningDistribution::new(LineShape::Gaussian { width: 2.0 }, 7)?;
    let w = p.tau_width(0.25);
    let wz = p.zeta_width(g, &nu);
    let bg = BackgroundField::constant(C64::new(0.5, 0.0), -12.0 * w, 12.0 * w, 1024)?;
    let medium = MediumProfile::uniform(g, 6.0 * wz)?;
    let spec = MarchSpec::new(64, 3.0 * wz).without_atoms();
    let prop = propagate(&launch_pulse(&p.with_q0(-1.5), &bg), &medium, &nu, InitialAtoms::DarkOfField, &spec)?;
    let tr = track_soliton(&prop.fields)?;
    let v = 1.0 / (1.0 + fit_slope(&tr.zeta, &tr.tau_center).unwrap());
    println!("gaussian 2 MHz, 7 nodes: PDE v/c {v:.5e}, closed form {:.5e}", soliton_velocity(&p, g, &nu, 0.25)?);
    Ok(())
}
