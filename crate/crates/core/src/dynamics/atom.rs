//! Pure-state atomic dynamics `i d(psi)/d(tau) = H psi` with
//!
//! ```text
//! H = -Delta |e><e| - sum_± ( conj(Omega_±)/2 |±><e| + Omega_±/2 |e><±| )
//! ```

use serde::{Deserialize, Serialize};

use crate::amplitudes::{AtomState, FieldPair, C64};
use crate::error::{Error, Result};

/// A single RK4 step must satisfy `dtau * max(|Delta|, |Omega|) <= RESOLUTION_LIMIT`.
pub const RESOLUTION_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DarkPhase {
    /// `(psi_+, psi_-) = (Omega_-, -Omega_+) / |Omega|`.
    Raw,
    /// Global phase chosen so that `psi_-` is real and non-negative
    /// (`psi_+` real positive when `psi_-` vanishes).
    #[default]
    RealMinus,
}

/// Ground-state superposition decoupled from `field`.
pub fn dark_state(field: &FieldPair, phase: DarkPhase) -> Result<AtomState> {
    let mag = field.magnitude();
    if !(mag > 0.0) {
        return Err(Error::ZeroField);
    }
    let zero = C64::new(0.0, 0.0);
    let raw_p = field.m / mag;
    let raw_m = -field.p / mag;
    let rotate = match phase {
        DarkPhase::Raw => C64::new(1.0, 0.0),
        DarkPhase::RealMinus => {
            if raw_m.norm() > 0.0 {
                raw_m.conj() / raw_m.norm()
            } else {
                raw_p.conj() / raw_p.norm()
            }
        }
    };
    let mut state = AtomState::new(zero, raw_p * rotate, raw_m * rotate);
    if phase == DarkPhase::RealMinus {
        state.m = C64::new(state.m.re, 0.0);
    }
    Ok(state)
}

/// `H psi` at detuning `delta`.
pub fn apply_hamiltonian(field: &FieldPair, delta: f64, psi: &AtomState) -> AtomState {
    AtomState {
        e: -psi.e * delta - (field.p * psi.p + field.m * psi.m) * 0.5,
        p: -(field.p.conj() * psi.e) * 0.5,
        m: -(field.m.conj() * psi.e) * 0.5,
    }
}

#[inline]
fn derivative(field: &FieldPair, delta: f64, psi: &AtomState) -> AtomState {
    // -i H psi
    let i = C64::new(0.0, 1.0);
    AtomState {
        e: i * (psi.e * delta + (field.p * psi.p + field.m * psi.m) * 0.5),
        p: i * field.p.conj() * psi.e * 0.5,
        m: i * field.m.conj() * psi.e * 0.5,
    }
}

/// Classical RK4 step with the field interpolated linearly between the step
/// endpoints. Does not check the resolution rule.
#[inline]
pub(crate) fn rk4_step(psi: &AtomState, start: &FieldPair, end: &FieldPair, delta: f64, dtau: f64) -> AtomState {
    let mid = start.lerp(end, 0.5);
    let k1 = derivative(start, delta, psi);
    let k2 = derivative(&mid, delta, &psi.axpy(0.5 * dtau, &k1));
    let k3 = derivative(&mid, delta, &psi.axpy(0.5 * dtau, &k2));
    let k4 = derivative(end, delta, &psi.axpy(dtau, &k3));
    let h6 = dtau / 6.0;
    AtomState {
        e: psi.e + (k1.e + (k2.e + k3.e) * 2.0 + k4.e) * h6,
        p: psi.p + (k1.p + (k2.p + k3.p) * 2.0 + k4.p) * h6,
        m: psi.m + (k1.m + (k2.m + k3.m) * 2.0 + k4.m) * h6,
    }
}

pub fn resolution_product(start: &FieldPair, end: &FieldPair, delta: f64, dtau: f64) -> f64 {
    dtau * delta.abs().max(start.magnitude()).max(end.magnitude())
}

/// One RK4 step of the Liouville equation from `tau` to `tau + dtau`, with
/// `start`/`end` the fields at the two ends of the step.
///
/// Refuses steps that do not resolve the detuning and Rabi frequency.
pub fn liouville_step(
    psi: &AtomState,
    start: &FieldPair,
    end: &FieldPair,
    delta: f64,
    dtau: f64,
) -> Result<AtomState> {
    let product = resolution_product(start, end, delta, dtau);
    if !(product <= RESOLUTION_LIMIT) {
        return Err(Error::StepTooLarge {
            product,
            limit: RESOLUTION_LIMIT,
        });
    }
    Ok(rk4_step(psi, start, end, delta, dtau))
}

/// Integrates across one grid cell with `substeps` equal RK4 steps, the field
/// linearly interpolated between the cell endpoints.
#[inline]
pub(crate) fn integrate_cell(
    psi: &AtomState,
    start: &FieldPair,
    end: &FieldPair,
    delta: f64,
    dtau: f64,
    substeps: usize,
) -> AtomState {
    if substeps == 1 {
        return rk4_step(psi, start, end, delta, dtau);
    }
    let h = dtau / substeps as f64;
    let inv = 1.0 / substeps as f64;
    let mut state = *psi;
    let mut a = *start;
    for s in 0..substeps {
        let b = if s + 1 == substeps {
            *end
        } else {
            start.lerp(end, (s + 1) as f64 * inv)
        };
        state = rk4_step(&state, &a, &b, delta, h);
        a = b;
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dark_state_of_circular_field() {
        let f = FieldPair::new(c(0.7, 0.2), c(0.0, 0.0));
        let raw = dark_state(&f, DarkPhase::Raw).unwrap();
        assert!(raw.p.norm() == 0.0 && (raw.m + f.p / f.p.norm()).norm() < 1e-15);
        let d = dark_state(&f, DarkPhase::RealMinus).unwrap();
        assert_eq!(d.m, c(1.0, 0.0));
        assert_eq!(d.p.norm(), 0.0);
    }

    #[test]
    fn dark_state_of_symmetric_field() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let f = FieldPair::new(c(r, 0.0), c(r, 0.0));
        let d = dark_state(&f, DarkPhase::Raw).unwrap();
        assert!((d.p - c(r, 0.0)).norm() < 1e-15 && (d.m - c(-r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dark_state_is_annihilated_by_coupling() {
        let f = FieldPair::new(c(0.3, -1.1), c(-0.4, 0.25));
        for phase in [DarkPhase::Raw, DarkPhase::RealMinus] {
            let d = dark_state(&f, phase).unwrap();
            assert!((d.norm_sqr() - 1.0).abs() < 1e-15);
            let h = apply_hamiltonian(&f, 3.0, &d);
            assert!(h.e.norm() < 1e-15);
        }
        assert!(dark_state(&FieldPair::ZERO, DarkPhase::Raw).is_err());
    }

    #[test]
    fn free_evolution() {
        let psi = AtomState::new(c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0));
        let (delta, dtau) = (2.0, 0.002);
        let out = liouville_step(&psi, &FieldPair::ZERO, &FieldPair::ZERO, delta, dtau).unwrap();
        assert_eq!(out.p, psi.p);
        assert_eq!(out.m, psi.m);
        let expect = psi.e * C64::from_polar(1.0, delta * dtau);
        assert!((out.e - expect).norm() < 1e-12);
    }

    #[test]
    fn refuses_under_resolved_step() {
        let f = FieldPair::new(c(1.0, 0.0), c(0.0, 0.0));
        let psi = AtomState::ground_minus();
        assert!(matches!(
            liouville_step(&psi, &f, &f, 0.0, 0.2),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(liouville_step(&psi, &f, &f, 50.0, 0.01).is_err());
    }

    #[test]
    fn two_level_rabi_oscillation() {
        // Omega_- = 0, Delta = 0, psi(0) = |+>: psi_+ = cos(Omega t/2), psi_e = i sin(Omega t/2).
        let omega = 0.8;
        let f = FieldPair::new(c(omega, 0.0), c(0.0, 0.0));
        let dtau = 0.01;
        let cycles = 10.0;
        let steps = (cycles * 2.0 * std::f64::consts::TAU / omega / dtau).round() as usize;
        let mut psi = AtomState::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let mut worst: f64 = 0.0;
        for n in 1..=steps {
            psi = liouville_step(&psi, &f, &f, 0.0, dtau).unwrap();
            let t = n as f64 * dtau;
            let pop = (0.5 * omega * t).sin().powi(2);
            worst = worst.max((psi.e.norm_sqr() - pop).abs());
        }
        assert!(worst < 1e-8, "max population error {worst}");
    }

    #[test]
    fn substeps_match_single_fine_steps() {
        let a = FieldPair::new(c(0.5, 0.1), c(-0.2, 0.3));
        let b = FieldPair::new(c(0.4, 0.0), c(0.1, 0.35));
        let psi = dark_state(&a, DarkPhase::RealMinus).unwrap();
        let coarse = integrate_cell(&psi, &a, &b, 0.7, 0.2, 8);
        let mut fine = psi;
        for s in 0..8 {
            let fa = a.lerp(&b, s as f64 / 8.0);
            let fb = a.lerp(&b, (s + 1) as f64 / 8.0);
            fine = liouville_step(&fine, &fa, &fb, 0.7, 0.025).unwrap();
        }
        assert!((coarse.e - fine.e).norm() < 1e-15 && (coarse.p - fine.p).norm() < 1e-15);
    }
}
