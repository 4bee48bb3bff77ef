//! Diagnostics on a propagated history: the local energy balance
//! `d/dzeta sum|Omega|^2 + 2 g d/dtau <rho_ee> = 0`, the soliton center track
//! and the implied group velocity.

use serde::{Deserialize, Serialize};

use crate::amplitudes::FieldPair;
use crate::analytic::stokes_of;
use crate::detuning::DetuningDistribution;
use crate::dynamics::propagate::{AtomGrid, FieldGrid};
use crate::error::{Error, Result};
use crate::medium::MediumProfile;

/// Minimum polarization deviation `1 - n.n_inf` that counts as a soliton.
pub const SOLITON_THRESHOLD: f64 = 1e-3;
/// Samples dimmer than this fraction of the brightest one carry no
/// polarization information and are skipped by the center search.
pub const DARK_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    #[default]
    Second,
    Fourth,
}

impl Stencil {
    fn half_width(self) -> usize {
        match self {
            Stencil::Second => 1,
            Stencil::Fourth => 2,
        }
    }

    fn derivative(self, f: impl Fn(isize) -> f64, h: f64) -> f64 {
        match self {
            Stencil::Second => (f(1) - f(-1)) / (2.0 * h),
            Stencil::Fourth => (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) / (12.0 * h),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub stencil: Stencil,
    /// Max absolute residual over the interior of the grid.
    pub max_residual: f64,
    /// Max `|2 g d/dtau <rho_ee>|` over the same points.
    pub peak_flux_gradient: f64,
    /// `max_residual / peak_flux_gradient` (0 when there is no flux).
    pub relative: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonTrack {
    pub zeta: Vec<f64>,
    pub tau_center: Vec<f64>,
    /// `1 - n(tau_c).n_inf` per slice.
    pub depth: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub conservation: Option<ConservationReport>,
    pub track: Option<SolitonTrack>,
    /// Least-squares `d tau_c / d zeta`.
    pub slope: Option<f64>,
    pub v_over_c: Option<f64>,
    pub max_norm_drift: f64,
    pub max_excited_population: f64,
}

fn excited_density(atoms: &[crate::amplitudes::AtomState], nu: &DetuningDistribution) -> f64 {
    atoms.iter().zip(nu.weights()).map(|(a, w)| w * a.e.norm_sqr()).sum()
}

fn uniform_spacing(z: &[f64]) -> Result<f64> {
    if z.len() < 2 {
        return Err(Error::GridTooShort("history needs at least two zeta slices".into()));
    }
    let h = z[1] - z[0];
    for w in z.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(Error::InvalidParameter("zeta slices must be uniformly spaced".into()));
        }
    }
    Ok(h)
}

/// Pointwise balance residual with the chosen central stencil in both
/// directions, evaluated on interior points.
pub fn conservation_residual(
    fields: &FieldGrid,
    atoms: &AtomGrid,
    nu: &DetuningDistribution,
    medium: &MediumProfile,
    stencil: Stencil,
) -> Result<ConservationReport> {
    if atoms.is_empty() || atoms.n_zeta() != fields.n_zeta() || atoms.n_tau != fields.n_tau {
        return Err(Error::InvalidParameter("atom history does not match the field history".into()));
    }
    let hz = uniform_spacing(&fields.zeta)?;
    let k = stencil.half_width();
    let (nt, nz) = (fields.n_tau, fields.n_zeta());
    if nt < 2 * k + 1 || nz < 2 * k + 1 {
        return Err(Error::GridTooShort(format!("stencil needs {} points per axis", 2 * k + 1)));
    }
    let intensity: Vec<f64> = fields.values.iter().map(FieldPair::intensity).collect();
    let mut rho = Vec::with_capacity(nt * nz);
    for j in 0..nz {
        for i in 0..nt {
            rho.push(excited_density(atoms.at(i, j), nu));
        }
    }
    let mut max_residual: f64 = 0.0;
    let mut peak: f64 = 0.0;
    let mut points = 0;
    for j in k..nz - k {
        let g = medium.coupling_at(fields.zeta[j]);
        for i in k..nt - k {
            let dz = stencil.derivative(|o| intensity[(j as isize + o) as usize * nt + i], hz);
            let dt = stencil.derivative(|o| rho[j * nt + (i as isize + o) as usize], fields.dtau);
            let flux = 2.0 * g * dt;
            max_residual = max_residual.max((dz + flux).abs());
            peak = peak.max(flux.abs());
            points += 1;
        }
    }
    Ok(ConservationReport {
        stencil,
        max_residual,
        peak_flux_gradient: peak,
        relative: if peak > 0.0 { max_residual / peak } else { 0.0 },
        points,
    })
}

/// Center of the polarization twist in one slice: minimum of the projection
/// of the Stokes direction on the `tau_min` asymptote, refined by a parabola
/// through the three nearest samples. Returns `(tau_c, depth)`.
pub fn locate_center(slice: &[FieldPair], tau0: f64, dtau: f64) -> Result<(f64, f64)> {
    if slice.len() < 3 {
        return Err(Error::GridTooShort("center search needs three samples".into()));
    }
    let n_inf = stokes_of(&slice[0]).direction();
    let brightest = slice.iter().fold(0.0, |m: f64, f| m.max(f.intensity()));
    let proj: Vec<f64> = slice
        .iter()
        .map(|f| {
            if f.intensity() <= DARK_FRACTION * brightest {
                return 1.0;
            }
            let d = stokes_of(f).direction();
            d[0] * n_inf[0] + d[1] * n_inf[1] + d[2] * n_inf[2]
        })
        .collect();
    let (imin, &pmin) = proj
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let depth = 1.0 - pmin;
    if !(depth >= SOLITON_THRESHOLD) {
        return Err(Error::NoSoliton { deviation: depth });
    }
    let i = imin.clamp(1, slice.len() - 2);
    let (a, b, c) = (proj[i - 1], proj[i], proj[i + 1]);
    let curv = a - 2.0 * b + c;
    let offset = if curv > 0.0 { 0.5 * (a - c) / curv } else { 0.0 };
    Ok((tau0 + (i as f64 + offset.clamp(-1.0, 1.0)) * dtau, depth))
}

pub fn track_soliton(fields: &FieldGrid) -> Result<SolitonTrack> {
    let mut track = SolitonTrack {
        zeta: Vec::with_capacity(fields.n_zeta()),
        tau_center: Vec::with_capacity(fields.n_zeta()),
        depth: Vec::with_capacity(fields.n_zeta()),
    };
    for j in 0..fields.n_zeta() {
        let (tc, depth) = locate_center(fields.slice(j), fields.tau0, fields.dtau)?;
        track.zeta.push(fields.zeta[j]);
        track.tau_center.push(tc);
        track.depth.push(depth);
    }
    Ok(track)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x[..n].iter().zip(&y[..n]) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Full report. Missing pieces (no atoms stored, no soliton present) show up
/// as `None` rather than errors.
pub fn analyze_history(
    fields: &FieldGrid,
    atoms: &AtomGrid,
    nu: &DetuningDistribution,
    medium: &MediumProfile,
) -> Result<DynamicsReport> {
    let conservation = if atoms.is_empty() || fields.n_zeta() < 3 {
        None
    } else {
        Some(conservation_residual(fields, atoms, nu, medium, Stencil::Second)?)
    };
    let track = match track_soliton(fields) {
        Ok(t) => Some(t),
        Err(Error::NoSoliton { .. }) => None,
        Err(e) => return Err(e),
    };
    let slope = track.as_ref().and_then(|t| fit_slope(&t.zeta, &t.tau_center));
    let mut max_norm_drift: f64 = 0.0;
    let mut max_excited: f64 = 0.0;
    for a in &atoms.values {
        max_norm_drift = max_norm_drift.max((a.norm_sqr() - 1.0).abs());
        max_excited = max_excited.max(a.e.norm_sqr());
    }
    Ok(DynamicsReport {
        conservation,
        track,
        slope,
        v_over_c: slope.map(|s| 1.0 / (1.0 + s)),
        max_norm_drift,
        max_excited_population: max_excited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitudes::C64;

    #[test]
    fn slope_of_a_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        assert!((fit_slope(&x, &y).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn uniform_field_has_no_soliton() {
        let slice = vec![FieldPair::new(C64::new(0.5, 0.0), C64::new(0.0, 0.0)); 32];
        assert!(matches!(locate_center(&slice, 0.0, 1.0), Err(Error::NoSoliton { .. })));
    }

    #[test]
    fn parabolic_refinement_recovers_offset() {
        let center = 10.3;
        let slice: Vec<FieldPair> = (0..30)
            .map(|i| {
                let x = i as f64 - center;
                let a = 0.3 * (-x * x / 50.0).exp();
                FieldPair::new(C64::new((1.0 - a * a).sqrt(), 0.0), C64::new(a, 0.0))
            })
            .collect();
        let (tc, _) = locate_center(&slice, 0.0, 1.0).unwrap();
        assert!((tc - center).abs() < 0.02, "{tc}");
    }
}
