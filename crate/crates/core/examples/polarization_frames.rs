//! Constant frame changes map the circularly polarized soliton onto other
//! incident polarizations. Intensity and the dark-state combination are
//! unchanged.

use slowlight::analytic::{stokes_of, BackgroundField, PolarizationFrame, SolitonParams, SolitonSolution};
use slowlight::{DetuningDistribution, MediumProfile, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = SolitonParams::figure1();
    let bg = BackgroundField::constant(C64::new(0.5, 0.0), -4000.0, 4000.0, 801)?;
    let medium = MediumProfile::uniform(50.0, 1.0)?;
    let nu = DetuningDistribution::sharp_line();
    let sol = SolitonSolution::new(params, &bg, &medium, &nu);
    let state = sol.state(0.0, 0.0)?;

    let frames = [
        ("identity", PolarizationFrame::identity()),
        ("swap", PolarizationFrame::swap()),
        ("linear 0", PolarizationFrame::linear(0.0)),
        ("linear pi/4", PolarizationFrame::linear(std::f64::consts::FRAC_PI_4)),
        ("su2", PolarizationFrame::from_angles(0.3, 0.2, -0.7, 1.1)),
    ];
    let dark = |f: &slowlight::FieldPair, a: &slowlight::AtomState| f.p * a.p + f.m * a.m;
    let d0 = dark(&state.field, &state.atoms[0]);
    for (name, frame) in frames {
        let t = frame.apply(&state);
        let s = stokes_of(&t.field).direction();
        let d = dark(&t.field, &t.atoms[0]);
        println!(
            "{name:>12}: |Om|^2 = {:.12}  stokes = ({:+.3}, {:+.3}, {:+.3})  dark-combination change = {:.1e}",
            t.field.intensity(),
            s[0],
            s[1],
            s[2],
            (d - d0).norm()
        );
    }
    Ok(())
}
