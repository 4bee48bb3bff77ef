//! Constant polarization-frame changes.
//!
//! A unitary `B` maps the circular field components as `Omega' = B Omega`.
//! The ground-state amplitudes transform with the complex conjugate,
//! `psi' = conj(B) psi = (B^-1)^T psi`, which keeps `H` form-invariant and
//! leaves the dark-state combination `Omega_+ psi_+ + Omega_- psi_-` unchanged.

use nalgebra::Matrix2;

use crate::amplitudes::{AtomState, FieldPair, C64};
use crate::analytic::soliton::SolitonState;
use crate::error::{Error, Result};

pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationFrame {
    matrix: Matrix2<C64>,
}

impl PolarizationFrame {
    pub fn new(matrix: Matrix2<C64>) -> Result<Self> {
        let dev = unitarity_defect(&matrix);
        if !(dev <= UNITARITY_TOL) {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self {
            matrix: Matrix2::identity(),
        }
    }

    /// Exchanges the two circular components.
    pub fn swap() -> Self {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        Self {
            matrix: Matrix2::new(o, l, l, o),
        }
    }

    /// Maps the `Omega_+`-only incident state onto linear polarization at
    /// angle `angle` (rad) from the first linear axis.
    pub fn linear(angle: f64) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a = C64::from_polar(r, -angle);
        let b = C64::from_polar(r, angle);
        Self {
            matrix: Matrix2::new(a, -b.conj(), b, a.conj()),
        }
    }

    /// General SU(2) element times a global phase.
    pub fn from_angles(global: f64, alpha: f64, beta: f64, gamma: f64) -> Self {
        let g = C64::from_polar(1.0, global);
        let (s, c) = gamma.sin_cos();
        let m = Matrix2::new(
            C64::from_polar(c, alpha),
            C64::from_polar(s, beta),
            -C64::from_polar(s, -beta),
            C64::from_polar(c, -alpha),
        ) * g;
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.matrix
    }

    pub fn apply_field(&self, f: &FieldPair) -> FieldPair {
        let m = &self.matrix;
        FieldPair::new(m[(0, 0)] * f.p + m[(0, 1)] * f.m, m[(1, 0)] * f.p + m[(1, 1)] * f.m)
    }

    pub fn apply_atom(&self, a: &AtomState) -> AtomState {
        let m = &self.matrix;
        AtomState {
            e: a.e,
            p: m[(0, 0)].conj() * a.p + m[(0, 1)].conj() * a.m,
            m: m[(1, 0)].conj() * a.p + m[(1, 1)].conj() * a.m,
        }
    }

    pub fn apply(&self, state: &SolitonState) -> SolitonState {
        SolitonState {
            field: self.apply_field(&state.field),
            q: state.q,
            phi: state.phi,
            atoms: state.atoms.iter().map(|a| self.apply_atom(a)).collect(),
        }
    }
}

/// Max-entry deviation of `B^dagger B` from the identity.
pub fn unitarity_defect(b: &Matrix2<C64>) -> f64 {
    let d = b.adjoint() * b - Matrix2::identity();
    d.iter().fold(0.0, |m: f64, z| m.max(z.norm()))
}

/// Changes the polarization frame of `state` by the unitary `b`.
pub fn apply_polarization_frame(b: &Matrix2<C64>, state: &SolitonState) -> Result<SolitonState> {
    Ok(PolarizationFrame::new(*b)?.apply(state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_are_unitary() {
        assert!(unitarity_defect(PolarizationFrame::linear(0.3).matrix()) < 1e-15);
        assert!(unitarity_defect(PolarizationFrame::from_angles(0.1, 0.2, 0.3, 0.4).matrix()) < 1e-15);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = Matrix2::new(
            C64::new(1.0, 0.0),
            C64::new(0.1, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        );
        assert!(PolarizationFrame::new(m).is_err());
    }

    #[test]
    fn linear_frame_maps_circular_to_linear() {
        let f = PolarizationFrame::linear(0.0).apply_field(&FieldPair::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
        assert!((f.p.norm_sqr() - 0.5).abs() < 1e-15 && (f.m.norm_sqr() - 0.5).abs() < 1e-15);
    }
}
