//! Validity checks for the closed-form soliton.

use serde::{Deserialize, Serialize};

use crate::analytic::{soliton_length_us, soliton_velocity, BackgroundField, SolitonParams};
use crate::analytic::observables::peak_excited_population;
use crate::detuning::DetuningDistribution;

/// Above this `max|Omega|^2 / (xi^2 + eta^2)` the closed form is not trusted.
pub const MAX_INTENSITY_RATIO: f64 = 0.05;
/// Above this `v/c` the slow-light velocity law is not trusted.
pub const MAX_VELOCITY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RegimeStatus {
    Pass,
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    /// `r = max|Omega|^2 / (xi^2 + eta^2)`.
    pub intensity_ratio: f64,
    pub v_over_c: f64,
    pub peak_excited_population: f64,
    pub status: RegimeStatus,
    pub warnings: Vec<String>,
}

pub fn validate_regime(
    params: &SolitonParams,
    background: &BackgroundField,
    coupling: f64,
    nu: &DetuningDistribution,
) -> RegimeReport {
    let intensity = background.max_intensity();
    let ratio = intensity / params.modulus_sqr();
    let mut warnings = Vec::new();
    if ratio > MAX_INTENSITY_RATIO {
        warnings.push(format!(
            "intensity ratio {ratio:.3e} exceeds {MAX_INTENSITY_RATIO}: closed form outside its validity limit"
        ));
    }
    let (v, pop) = match soliton_velocity(params, coupling, nu, intensity) {
        Ok(v) if intensity > 0.0 => {
            let len = soliton_length_us(params, intensity, v);
            (v, peak_excited_population(coupling, len, v))
        }
        _ => {
            warnings.push("no medium or no light: velocity undefined".to_string());
            (f64::INFINITY, f64::NAN)
        }
    };
    if v > MAX_VELOCITY {
        warnings.push(format!("v/c = {v:.3e} exceeds {MAX_VELOCITY}: not slow light"));
    }
    RegimeReport {
        intensity_ratio: ratio,
        v_over_c: v,
        peak_excited_population: pop,
        status: if warnings.is_empty() {
            RegimeStatus::Pass
        } else {
            RegimeStatus::Warn
        },
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitudes::C64;

    fn background(omega: f64) -> BackgroundField {
        BackgroundField::constant(C64::new(omega, 0.0), -10.0, 10.0, 11).unwrap()
    }

    #[test]
    fn figure1_passes() {
        let nu = DetuningDistribution::sharp_line();
        let r = validate_regime(&SolitonParams::figure1(), &background(0.5), 50.0, &nu);
        assert!((r.intensity_ratio - 2.5e-3).abs() < 1e-15);
        assert!((r.v_over_c - 2.5e-3).abs() < 1e-15);
        assert_eq!(r.status, RegimeStatus::Pass);
        // |psi_e|^2 at the centre for zero detuning: |Omega|^2 eta^2 / (4 |s|^4)
        let p = SolitonParams::figure1();
        let expect = 0.25 * p.eta() * p.eta() / (4.0 * 1e4);
        assert!((r.peak_excited_population - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn strong_field_warns() {
        let nu = DetuningDistribution::sharp_line();
        let r = validate_regime(&SolitonParams::figure1(), &background(10.0), 50.0, &nu);
        assert!((r.intensity_ratio - 1.0).abs() < 1e-12);
        assert_eq!(r.status, RegimeStatus::Warn);
    }

    #[test]
    fn empty_medium_warns() {
        let nu = DetuningDistribution::sharp_line();
        let r = validate_regime(&SolitonParams::figure1(), &background(0.5), 0.0, &nu);
        assert_eq!(r.status, RegimeStatus::Warn);
    }
}
