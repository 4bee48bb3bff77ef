//! Closed-form single slow-light soliton.
//!
//! With `s = xi + i eta` and the background `Omega(tau)`:
//!
//! ```text
//! Omega_± = Omega phi_±
//! phi_+   = (xi - i eta tanh Q) / s
//! phi_-   = eta exp(-i Phi) sech Q / s
//! Q   = Q0   - eta I(tau) / (4|s|^2) + G(zeta) sum_k w_k eta        / (2((xi-D_k)^2 + eta^2))
//! Phi = Phi0 + xi  I(tau) / (4|s|^2) - G(zeta) sum_k w_k (xi - D_k) / (2((xi-D_k)^2 + eta^2))
//! psi_+ = -s phi_- / (xi - D + i eta)
//! psi_- = (s phi_+ - D) / (xi - D + i eta)
//! psi_e = Omega_- / (2 (xi - D + i eta))
//! ```
//!
//! `I(tau)` is the cumulative background intensity anchored at `tau = 0`
//! and `G(zeta)` the integrated coupling anchored at `zeta = 0`; constants
//! of integration live in `Q0` and `Phi0`. The solution is valid for
//! `|Omega|^2 << xi^2 + eta^2`.

use crate::amplitudes::{AtomState, FieldPair, C64};
use crate::analytic::background::BackgroundField;
use crate::analytic::params::SolitonParams;
use crate::detuning::DetuningDistribution;
use crate::error::{Error, Result};
use crate::medium::MediumProfile;

/// Soliton fields, phases and per-detuning atomic amplitudes at one
/// `(tau, zeta)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonState {
    pub field: FieldPair,
    pub q: f64,
    pub phi: f64,
    /// One entry per detuning node, in node order.
    pub atoms: Vec<AtomState>,
}

/// Normalized polarization amplitudes `(phi_+, phi_-)`; `|phi_+|^2 + |phi_-|^2 = 1`.
pub fn polarization_amplitudes(params: &SolitonParams, q: f64, phi: f64) -> (C64, C64) {
    let s = params.spectral();
    let sech = 1.0 / q.cosh();
    let phi_p = C64::new(params.xi, -params.eta * q.tanh()) / s;
    let phi_m = C64::from_polar(params.eta * sech, -phi) / s;
    (phi_p, phi_m)
}

/// Atomic amplitudes at detuning `delta` for the given normalized
/// polarization and field.
pub fn atom_amplitudes(params: &SolitonParams, phi_p: C64, phi_m: C64, omega_m: C64, delta: f64) -> AtomState {
    let s = params.spectral();
    let denom = C64::new(params.xi - delta, params.eta);
    AtomState {
        e: omega_m / (denom * 2.0),
        p: -(s * phi_m) / denom,
        m: (s * phi_p - delta) / denom,
    }
}

/// Reusable evaluator for one soliton in a fixed background and medium.
#[derive(Debug, Clone)]
pub struct SolitonSolution<'a> {
    params: SolitonParams,
    background: &'a BackgroundField,
    medium: &'a MediumProfile,
    nu: &'a DetuningDistribution,
    q_rate: f64,
    phi_rate: f64,
}

impl<'a> SolitonSolution<'a> {
    pub fn new(
        params: SolitonParams,
        background: &'a BackgroundField,
        medium: &'a MediumProfile,
        nu: &'a DetuningDistribution,
    ) -> Self {
        Self {
            q_rate: params.q_rate(nu),
            phi_rate: params.phi_rate(nu),
            params,
            background,
            medium,
            nu,
        }
    }

    pub fn params(&self) -> &SolitonParams {
        &self.params
    }

    pub fn background(&self) -> &BackgroundField {
        self.background
    }

    pub fn nu(&self) -> &DetuningDistribution {
        self.nu
    }

    /// `(Q, Phi)` at `(tau, zeta)`; needs no grid check for `tau`.
    pub fn phases(&self, tau: f64, zeta: f64) -> (f64, f64) {
        let i = self.background.cumulative_intensity(tau);
        let g = self.medium.integrated_coupling(zeta);
        self.phases_from_integrals(i, g)
    }

    fn phases_from_integrals(&self, cumulative: f64, integrated_coupling: f64) -> (f64, f64) {
        let inv = 1.0 / (4.0 * self.params.modulus_sqr());
        let q = self.params.q0 - self.params.eta * cumulative * inv + self.q_rate * integrated_coupling;
        let phi = self.params.phi0 + self.params.xi * cumulative * inv - self.phi_rate * integrated_coupling;
        (q, phi)
    }

    fn check(&self, tau: f64, zeta: f64) -> Result<C64> {
        if !(zeta >= 0.0) {
            return Err(Error::OutOfGrid(format!("zeta = {zeta} must be >= 0")));
        }
        self.background.field_at(tau)
    }

    pub fn field(&self, tau: f64, zeta: f64) -> Result<FieldPair> {
        let omega = self.check(tau, zeta)?;
        let (q, phi) = self.phases(tau, zeta);
        let (pp, pm) = polarization_amplitudes(&self.params, q, phi);
        Ok(FieldPair::new(omega * pp, omega * pm))
    }

    pub fn state(&self, tau: f64, zeta: f64) -> Result<SolitonState> {
        let omega = self.check(tau, zeta)?;
        let (q, phi) = self.phases(tau, zeta);
        Ok(self.assemble(omega, q, phi))
    }

    fn assemble(&self, omega: C64, q: f64, phi: f64) -> SolitonState {
        let (pp, pm) = polarization_amplitudes(&self.params, q, phi);
        let field = FieldPair::new(omega * pp, omega * pm);
        let atoms = self
            .nu
            .nodes()
            .iter()
            .map(|&d| atom_amplitudes(&self.params, pp, pm, field.m, d))
            .collect();
        SolitonState { field, q, phi, atoms }
    }

    /// State at background grid index `i`, using the exact prefix sum.
    pub fn state_at_index(&self, i: usize, zeta: f64) -> SolitonState {
        let omega = self.background.samples()[i];
        let (q, phi) = self.phases_from_integrals(
            self.background.cumulative_at(i),
            self.medium.integrated_coupling(zeta),
        );
        self.assemble(omega, q, phi)
    }

    /// Fields on the whole background grid at `zeta`.
    pub fn field_slice(&self, zeta: f64) -> Vec<FieldPair> {
        (0..self.background.len())
            .map(|i| self.state_at_index(i, zeta).field)
            .collect()
    }

    /// Retarded time of the soliton centre (`Q = 0`) at `zeta`, if it lies
    /// inside the background grid.
    pub fn center_tau(&self, zeta: f64) -> Option<f64> {
        let g = self.medium.integrated_coupling(zeta);
        let target = (self.params.q0 + self.q_rate * g) * 4.0 * self.params.modulus_sqr() / self.params.eta;
        self.background.tau_at_cumulative(target)
    }
}

/// Evaluates the soliton at a single point.
pub fn evaluate_soliton(
    params: &SolitonParams,
    background: &BackgroundField,
    medium: &MediumProfile,
    nu: &DetuningDistribution,
    tau: f64,
    zeta: f64,
) -> Result<SolitonState> {
    SolitonSolution::new(*params, background, medium, nu).state(tau, zeta)
}

/// Boundary fields `Omega_±(tau, zeta = 0)` on a uniform grid; the input
/// pulse that launches the soliton into the medium.
#[derive(Debug, Clone, PartialEq)]
pub struct LaunchPulse {
    pub tau0: f64,
    pub dtau: f64,
    pub fields: Vec<FieldPair>,
}

impl LaunchPulse {
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn tau(&self, i: usize) -> f64 {
        self.tau0 + i as f64 * self.dtau
    }
}

/// Outside the medium (`g = 0`) the solution gives the pulse shape that
/// launches the soliton. Evaluated on the background's own grid.
pub fn launch_pulse(params: &SolitonParams, background: &BackgroundField) -> LaunchPulse {
    let vacuum = MediumProfile::vacuum();
    let nu = DetuningDistribution::sharp_line();
    let sol = SolitonSolution::new(*params, background, &vacuum, &nu);
    LaunchPulse {
        tau0: background.tau0(),
        dtau: background.dtau(),
        fields: sol.field_slice(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_background() -> BackgroundField {
        BackgroundField::constant(C64::new(0.5, 0.0), -4000.0, 4000.0, 4001).unwrap()
    }

    #[test]
    fn figure1_center_values() {
        let p = SolitonParams::figure1();
        let b = fig1_background();
        let m = MediumProfile::uniform(50.0, 10.0).unwrap();
        let nu = DetuningDistribution::sharp_line();
        let st = evaluate_soliton(&p, &b, &m, &nu, 0.0, 0.0).unwrap();
        assert_eq!(st.q, 0.0);
        let pp = (st.field.p / 0.5).norm_sqr();
        let pm = (st.field.m / 0.5).norm_sqr();
        assert!((pp - p.xi() * p.xi() / 100.0).abs() < 1e-14);
        assert!((pp - 0.095_49).abs() < 1e-5);
        assert!((pm - 0.904_51).abs() < 1e-5);
        assert!((pp + pm - 1.0).abs() < 1e-14);
        assert!((st.field.p - C64::new(0.04775, -0.14695)).norm() < 1e-5);
    }

    #[test]
    fn asymptotic_limits() {
        let p = SolitonParams::new(3.0, 4.0, 0.0, 0.7).unwrap();
        let (pp, pm) = polarization_amplitudes(&p, -60.0, 0.3);
        assert!((pp - 1.0).norm() < 1e-15 && pm.norm() < 1e-20);
        let a = atom_amplitudes(&p, pp, pm, C64::new(0.0, 0.0), 0.0);
        assert!(a.p.norm() < 1e-20 && (a.m.norm() - 1.0).abs() < 1e-15);
        let (pp, pm) = polarization_amplitudes(&p, 60.0, 0.3);
        let expect = C64::from_polar(1.0, -2.0 * p.theta());
        assert!((pp - expect).norm() < 1e-15 && pm.norm() < 1e-20);
    }

    #[test]
    fn ground_norm_exact_at_any_detuning() {
        let p = SolitonParams::new(2.0, 5.0, 0.0, 0.0).unwrap();
        for &q in &[-3.0, -0.4, 0.0, 1.3] {
            let (pp, pm) = polarization_amplitudes(&p, q, 0.9);
            for &d in &[-2.0, 0.0, 0.3, 4.0] {
                let a = atom_amplitudes(&p, pp, pm, C64::new(0.0, 0.0), d);
                assert!((a.p.norm_sqr() + a.m.norm_sqr() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn out_of_grid_is_error() {
        let p = SolitonParams::figure1();
        let b = fig1_background();
        let m = MediumProfile::vacuum();
        let nu = DetuningDistribution::sharp_line();
        assert!(evaluate_soliton(&p, &b, &m, &nu, 5000.0, 0.0).is_err());
        assert!(evaluate_soliton(&p, &b, &m, &nu, 0.0, -1.0).is_err());
    }

    #[test]
    fn launch_pulse_keeps_total_intensity() {
        let p = SolitonParams::figure1();
        let b = fig1_background();
        let pulse = launch_pulse(&p, &b);
        for f in &pulse.fields {
            assert!((f.intensity() - 0.25).abs() / 0.25 < 1e-12);
        }
    }

    #[test]
    fn center_tracks_cumulative_intensity() {
        let p = SolitonParams::figure1();
        let b = fig1_background();
        let g = 50.0;
        let m = MediumProfile::uniform(g, 10.0).unwrap();
        let nu = DetuningDistribution::sharp_line();
        let sol = SolitonSolution::new(p, &b, &m, &nu);
        let z = 2.0;
        let tc = sol.center_tau(z).unwrap();
        assert!((tc - 2.0 * g * z / 0.25).abs() < 1e-8);
        assert!(sol.phases(tc, z).0.abs() < 1e-10);
    }
}
