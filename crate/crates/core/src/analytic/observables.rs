//! Velocity, length, loss and excited-state population of a soliton.

use serde::{Deserialize, Serialize};

use crate::analytic::params::SolitonParams;
use crate::detuning::DetuningDistribution;
use crate::error::{Error, Result};
use crate::units::{meters_to_us, us_to_meters};

/// `v/c = |Omega|^2 / (2(xi^2+eta^2)) * [sum_k w_k g / ((xi-D_k)^2 + eta^2)]^-1`.
///
/// Valid for `v/c << 1`. For a sharp line this is exactly `|Omega|^2 / (2g)`.
pub fn soliton_velocity(
    params: &SolitonParams,
    coupling: f64,
    nu: &DetuningDistribution,
    intensity: f64,
) -> Result<f64> {
    if !(coupling > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "soliton velocity needs g > 0 (got {coupling})"
        )));
    }
    let denom = nu.integrate(|d| {
        let x = params.xi - d;
        coupling / (x * x + params.eta * params.eta)
    });
    Ok(intensity / (2.0 * params.modulus_sqr()) / denom)
}

/// Soliton length in units of light travel time (us):
/// `l_s = 4 (xi^2+eta^2) v / (eta |Omega|^2)`.
pub fn soliton_length_us(params: &SolitonParams, intensity: f64, v_over_c: f64) -> f64 {
    4.0 * params.modulus_sqr() * v_over_c / (params.eta * intensity)
}

/// Fractional loss `eta_L = 32 pi / (n lambda^3) * l lambda / l_s^2`.
/// All lengths in meters, `density` in m^-3.
pub fn fractional_loss(density: f64, wavelength: f64, distance: f64, length: f64) -> f64 {
    32.0 * std::f64::consts::PI / (density * wavelength.powi(3)) * distance * wavelength / (length * length)
}

/// Smallest soliton length (m) whose loss over `distance` stays within
/// `budget`, from inverting the loss estimate.
pub fn min_length_for_loss(density: f64, wavelength: f64, distance: f64, budget: f64) -> f64 {
    (distance * wavelength).sqrt() * (32.0 * std::f64::consts::PI / (density * wavelength.powi(3) * budget)).sqrt()
}

/// Peak excited-state population `2 (c/g) l_s^-2 v`, dimensionless.
pub fn peak_excited_population(coupling: f64, length_us: f64, v_over_c: f64) -> f64 {
    2.0 * v_over_c / (coupling * length_us * length_us)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthAndLoss {
    pub length_m: f64,
    pub loss: f64,
    pub peak_excited_population: f64,
}

/// Length, fractional loss over `distance` (m) and peak excited population.
#[allow(clippy::too_many_arguments)]
pub fn soliton_length_and_loss(
    params: &SolitonParams,
    coupling: f64,
    intensity: f64,
    v_over_c: f64,
    density: f64,
    wavelength: f64,
    distance: f64,
) -> Result<LengthAndLoss> {
    if !(coupling > 0.0) || !(intensity > 0.0) || !(v_over_c > 0.0) {
        return Err(Error::InvalidParameter("g, |Omega|^2 and v/c must be > 0".into()));
    }
    if !(density > 0.0) || !(wavelength > 0.0) || !(distance >= 0.0) {
        return Err(Error::InvalidParameter("n, lambda must be > 0 and l >= 0".into()));
    }
    let length_us = soliton_length_us(params, intensity, v_over_c);
    let length_m = us_to_meters(length_us);
    Ok(LengthAndLoss {
        length_m,
        loss: fractional_loss(density, wavelength, distance, length_m),
        peak_excited_population: peak_excited_population(coupling, meters_to_us(length_m), v_over_c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_line_velocity_is_closed_form() {
        let nu = DetuningDistribution::sharp_line();
        for &(xi, eta) in &[(3.0, 4.0), (-2.0, 0.5), (10.0, 10.0)] {
            let p = SolitonParams::new(xi, eta, 0.0, 0.0).unwrap();
            let v = soliton_velocity(&p, 50.0, &nu, 0.25).unwrap();
            assert!((v - 0.25 / 100.0).abs() < 1e-15);
        }
    }

    #[test]
    fn velocity_needs_medium() {
        let p = SolitonParams::figure1();
        assert!(soliton_velocity(&p, 0.0, &DetuningDistribution::sharp_line(), 0.25).is_err());
    }

    #[test]
    fn loss_worked_example() {
        let lambda: f64 = 5e-7;
        let n = 1.0 / lambda.powi(3);
        let loss = fractional_loss(n, lambda, 1e-2, 1e-3);
        let expect = 32.0 * std::f64::consts::PI * 5e-3;
        assert!(((loss - expect) / expect).abs() < 1e-9);
        assert!((loss - 0.5027).abs() < 1e-4);
        let doubled = fractional_loss(n, lambda, 1e-2, 2e-3);
        assert_eq!(loss / doubled, 4.0);
    }

    #[test]
    fn min_length_inverts_loss() {
        let (n, lambda, l, budget) = (3e18, 7.8e-7, 0.05, 0.01);
        let ls = min_length_for_loss(n, lambda, l, budget);
        assert!((fractional_loss(n, lambda, l, ls) - budget).abs() / budget < 1e-12);
    }
}
