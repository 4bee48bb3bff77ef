//! Length, loss and excited-state population for a few media.

use slowlight::analytic::{fractional_loss, min_length_for_loss, soliton_length_and_loss, soliton_velocity, SolitonParams};
use slowlight::{coupling_from_atomic_data, AtomicData, DetuningDistribution};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SolitonParams::figure1();
    let nu = DetuningDistribution::sharp_line();
    let intensity = 0.25;
    let distance = 1e-2;
    for density in [1e15, 1e17, 1e18, 1e19] {
        let data = AtomicData {
            einstein_a: 6.15e7,
            density,
            wavelength: 5.89e-7,
            cross_section: 1e-6,
        };
        let g = coupling_from_atomic_data(&data)?;
        let v = soliton_velocity(&p, g, &nu, intensity)?;
        let r = soliton_length_and_loss(&p, g, intensity, v, density, data.wavelength, distance)?;
        let min = min_length_for_loss(density, data.wavelength, distance, 0.1);
        println!(
            "n = {density:.0e} m^-3: g = {g:.3e} MHz^2, v/c = {v:.2e}, l_s = {:.2e} m, loss over 1 cm = {:.2e}, |psi_e|^2 ~ {:.1e}{}",
            r.length_m,
            r.loss,
            r.peak_excited_population,
            if r.length_m < min { "  (too short for a 10% loss budget)" } else { "" }
        );
    }
    let lambda: f64 = 5e-7;
    let n = 1.0 / lambda.powi(3);
    println!("n lambda^3 = 1, l = 1 cm, l_s = 1 mm: eta_L = {:.4}", fractional_loss(n, lambda, 1e-2, 1e-3));
    Ok(())
}
