//! Fluctuation modes of the four soliton parameters and their bracket
//! matrix; {Q0, xi} and {Phi0, eta} come out as one, the rest vanish.

use slowlight::analytic::{BackgroundField, SolitonParams};
use slowlight::modes::{all_modes, bracket_matrix, symplectic_check_and_rescale, ModeParam, QuantumScale};
use slowlight::{DetuningDistribution, MediumProfile, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SolitonParams::figure1();
    let w = p.tau_width(0.25);
    let bg = BackgroundField::constant(C64::new(0.5, 0.0), -20.0 * w, 20.0 * w, 8001)?;
    let medium = MediumProfile::uniform(50.0, 1.0)?;
    let nu = DetuningDistribution::sharp_line();
    let modes = all_modes(&p, &bg, &medium, &nu, 0.0)?;
    for m in &modes {
        println!("{:>5}: peak {:.3e}, edge ratio {:.1e}", m.param.name(), m.peak(), m.edge_ratio());
    }
    let b = bracket_matrix(&modes)?;
    print!("{:>6}", "");
    for c in ModeParam::ALL {
        print!("{:>12}", c.name());
    }
    println!();
    for r in ModeParam::ALL {
        print!("{:>6}", r.name());
        for c in ModeParam::ALL {
            print!("{:>12.3e}", b.get(r, c));
        }
        println!();
    }
    // sodium D2-like dipole, 1 mm^2 beam
    let scale = QuantumScale::new(2.0e-29, 3.2e15, 1e-6)?;
    let rep = symplectic_check_and_rescale(&b, &p, Some(&scale), 1e-2);
    println!("canonical: {} (max deviation {:.2e})", rep.pass, rep.max_deviation);
    println!("rescale factor {:.3e} MHz -> xi0 = {:.3e}, eta0 = {:.3e}", rep.rescale_factor_mhz.unwrap(), rep.xi0.unwrap(), rep.eta0.unwrap());
    Ok(())
}
