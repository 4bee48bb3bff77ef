//! Lax pair of the Maxwell-Liouville system and its zero-curvature check.
//!
//! `U = -i H(Delta)` with the detuning `Delta` as spectral parameter and
//! `V = -(i g / 2) sum_k w_k psi_k psi_k^dagger / (Delta - Delta_k)`. On exact
//! solutions `dU/dzeta - dV/dtau + [U, V] = 0`; the `(e, ±)` entries carry the
//! field equation and the remaining entries vanish through the Liouville
//! equation.

use std::io::Write;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{AtomState, FieldPair, C64};
use crate::analytic::SolitonSolution;
use crate::detuning::DetuningDistribution;
use crate::dynamics::{AtomGrid, FieldGrid};
use crate::error::{Error, Result};
use crate::medium::MediumProfile;

/// Minimum distance between the spectral parameter and any quadrature node.
pub const NODE_EXCLUSION: f64 = 1e-6;

pub type Mat3 = Matrix3<C64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaxPairSample {
    pub u: Mat3,
    pub v: Mat3,
    pub spectral: f64,
}

impl LaxPairSample {
    /// Max entry of `iU - (iU)^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let iu = self.u * C64::i();
        let d = iu - iu.adjoint();
        d.iter().fold(0.0, |m: f64, z| m.max(z.norm()))
    }
}

/// Hamiltonian matrix in the `(e, +, -)` basis.
pub fn hamiltonian(field: &FieldPair, delta: f64) -> Mat3 {
    let h = 0.5;
    Mat3::new(
        C64::new(-delta, 0.0),
        -field.p * h,
        -field.m * h,
        -field.p.conj() * h,
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        -field.m.conj() * h,
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    )
}

fn projector(a: &AtomState) -> Mat3 {
    let v = a.as_array();
    Mat3::from_fn(|r, c| v[r] * v[c].conj())
}

pub fn build_lax_pair(
    field: &FieldPair,
    atoms: &[AtomState],
    nu: &DetuningDistribution,
    coupling: f64,
    spectral: f64,
) -> Result<LaxPairSample> {
    if atoms.len() != nu.len() {
        return Err(Error::InvalidParameter(format!(
            "{} atom states for {} detuning nodes",
            atoms.len(),
            nu.len()
        )));
    }
    let mut v = Mat3::zeros();
    for ((a, &node), &w) in atoms.iter().zip(nu.nodes()).zip(nu.weights()) {
        let gap = spectral - node;
        if gap.abs() < NODE_EXCLUSION {
            return Err(Error::NodeCollision { spectral, node });
        }
        v += projector(a) * C64::new(w / gap, 0.0);
    }
    v *= C64::new(0.0, -0.5 * coupling);
    Ok(LaxPairSample {
        u: hamiltonian(field, spectral) * C64::new(0.0, -1.0),
        v,
        spectral,
    })
}

/// Anything that can supply fields and atoms at `(tau, zeta)`.
pub trait History {
    fn field(&self, tau: f64, zeta: f64) -> Result<FieldPair>;
    fn atoms(&self, tau: f64, zeta: f64) -> Result<Vec<AtomState>>;
    fn coupling(&self, zeta: f64) -> f64;
    fn nu(&self) -> &DetuningDistribution;
}

/// The closed-form soliton as a history, optionally with `Omega_+` scaled
/// (atoms untouched) as a corrupted control.
pub struct AnalyticHistory<'a> {
    pub solution: SolitonSolution<'a>,
    pub medium: &'a MediumProfile,
    pub plus_scale: f64,
}

impl<'a> AnalyticHistory<'a> {
    pub fn new(solution: SolitonSolution<'a>, medium: &'a MediumProfile) -> Self {
        Self {
            solution,
            medium,
            plus_scale: 1.0,
        }
    }

    pub fn corrupted(mut self, plus_scale: f64) -> Self {
        self.plus_scale = plus_scale;
        self
    }
}

impl History for AnalyticHistory<'_> {
    fn field(&self, tau: f64, zeta: f64) -> Result<FieldPair> {
        let mut f = self.solution.field(tau, zeta)?;
        f.p *= self.plus_scale;
        Ok(f)
    }

    fn atoms(&self, tau: f64, zeta: f64) -> Result<Vec<AtomState>> {
        Ok(self.solution.state(tau, zeta)?.atoms)
    }

    fn coupling(&self, zeta: f64) -> f64 {
        self.medium.coupling_at(zeta)
    }

    fn nu(&self) -> &DetuningDistribution {
        self.solution.nu()
    }
}

/// A propagated history; lookups must land on grid points.
pub struct GridHistory<'a> {
    pub fields: &'a FieldGrid,
    pub atoms: &'a AtomGrid,
    pub nu: &'a DetuningDistribution,
    pub medium: &'a MediumProfile,
}

impl GridHistory<'_> {
    fn index(&self, tau: f64, zeta: f64) -> Result<(usize, usize)> {
        let x = (tau - self.fields.tau0) / self.fields.dtau;
        let i = x.round();
        if (x - i).abs() > 1e-6 || i < 0.0 || i as usize >= self.fields.n_tau {
            return Err(Error::OutOfGrid(format!("tau = {tau} is not a grid point")));
        }
        let j = self
            .fields
            .zeta
            .iter()
            .position(|&z| (z - zeta).abs() <= 1e-9 * z.abs().max(1e-3))
            .ok_or_else(|| Error::OutOfGrid(format!("zeta = {zeta} is not a stored slice")))?;
        Ok((i as usize, j))
    }
}

impl History for GridHistory<'_> {
    fn field(&self, tau: f64, zeta: f64) -> Result<FieldPair> {
        let (i, j) = self.index(tau, zeta)?;
        Ok(self.fields.at(i, j))
    }

    fn atoms(&self, tau: f64, zeta: f64) -> Result<Vec<AtomState>> {
        if self.atoms.is_empty() {
            return Err(Error::InvalidParameter("history has no stored atoms".into()));
        }
        let (i, j) = self.index(tau, zeta)?;
        Ok(self.atoms.at(i, j).to_vec())
    }

    fn coupling(&self, zeta: f64) -> f64 {
        self.medium.coupling_at(zeta)
    }

    fn nu(&self) -> &DetuningDistribution {
        self.nu
    }
}

fn sample<H: History + ?Sized>(h: &H, tau: f64, zeta: f64, spectral: f64) -> Result<LaxPairSample> {
    let atoms = h.atoms(tau, zeta)?;
    build_lax_pair(&h.field(tau, zeta)?, &atoms, h.nu(), h.coupling(zeta), spectral)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePoint {
    pub tau: f64,
    pub zeta: f64,
    /// Frobenius norm of `dU/dzeta - dV/dtau + [U, V]`.
    pub residual: f64,
    /// Frobenius norm of `dU/dzeta`, for scale.
    pub scale: f64,
    /// `|tr [U, V]|`.
    pub commutator_trace: f64,
    /// `|tr (dV/dtau - dU/dzeta)|`.
    pub derivative_trace: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub spectral: f64,
    pub h_tau: f64,
    pub h_zeta: f64,
    pub points: Vec<CurvaturePoint>,
    pub max_residual: f64,
    pub mean_residual: f64,
}

/// Central-difference zero-curvature residual at each `(tau, zeta)` point.
/// Stencil points outside the history are reported as `OutOfGrid`.
pub fn zero_curvature_residual<H: History + ?Sized>(
    history: &H,
    spectral: f64,
    points: &[(f64, f64)],
    h_tau: f64,
    h_zeta: f64,
) -> Result<CurvatureReport> {
    if !(h_tau > 0.0 && h_zeta > 0.0) {
        return Err(Error::InvalidParameter("stencil spacings must be positive".into()));
    }
    let mut out = Vec::with_capacity(points.len());
    for &(tau, zeta) in points {
        if zeta - h_zeta < 0.0 {
            return Err(Error::OutOfGrid(format!("zeta stencil at {zeta} leaves the medium")));
        }
        let c = sample(history, tau, zeta, spectral)?;
        let zp = sample(history, tau, zeta + h_zeta, spectral)?;
        let zm = sample(history, tau, zeta - h_zeta, spectral)?;
        let tp = sample(history, tau + h_tau, zeta, spectral)?;
        let tm = sample(history, tau - h_tau, zeta, spectral)?;
        let du = (zp.u - zm.u) / C64::new(2.0 * h_zeta, 0.0);
        let dv = (tp.v - tm.v) / C64::new(2.0 * h_tau, 0.0);
        let comm = c.u * c.v - c.v * c.u;
        let total = du - dv + comm;
        out.push(CurvaturePoint {
            tau,
            zeta,
            residual: total.norm(),
            scale: du.norm(),
            commutator_trace: comm.trace().norm(),
            derivative_trace: (dv - du).trace().norm(),
        });
    }
    let max_residual = out.iter().fold(0.0, |m: f64, p| m.max(p.residual));
    let mean_residual = if out.is_empty() {
        0.0
    } else {
        out.iter().map(|p| p.residual).sum::<f64>() / out.len() as f64
    };
    Ok(CurvatureReport {
        spectral,
        h_tau,
        h_zeta,
        points: out,
        max_residual,
        mean_residual,
    })
}

/// One row per refinement level.
pub fn write_refinement_csv<W: Write>(w: &mut W, reports: &[CurvatureReport], provenance: &str) -> std::io::Result<()> {
    writeln!(w, "# {provenance}")?;
    writeln!(w, "h_tau,h_zeta,spectral_delta,max_residual,mean_residual")?;
    for r in reports {
        writeln!(
            w,
            "{:e},{:e},{:e},{:e},{:e}",
            r.h_tau, r.h_zeta, r.spectral, r.max_residual, r.mean_residual
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_free_u_is_diagonal() {
        let nu = DetuningDistribution::sharp_line();
        let s = build_lax_pair(&FieldPair::ZERO, &[AtomState::ground_minus()], &nu, 40.0, 3.0).unwrap();
        assert_eq!(s.u[(0, 0)], C64::new(0.0, 3.0));
        for (k, z) in s.u.iter().enumerate() {
            if k != 0 {
                assert_eq!(*z, C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn sharp_line_v_is_one_node() {
        let nu = DetuningDistribution::sharp_line();
        let g = 40.0;
        let s = build_lax_pair(&FieldPair::ZERO, &[AtomState::ground_minus()], &nu, g, 20.0).unwrap();
        let expected = C64::new(0.0, -g / 40.0);
        assert!((s.v[(2, 2)] - expected).norm() < 1e-15);
        assert!(s.v[(0, 0)].norm() == 0.0 && s.v[(1, 1)].norm() == 0.0);
    }

    #[test]
    fn collision_is_refused() {
        let nu = DetuningDistribution::sharp_line();
        let r = build_lax_pair(&FieldPair::ZERO, &[AtomState::ground_minus()], &nu, 1.0, 5e-7);
        assert!(matches!(r, Err(Error::NodeCollision { .. })));
    }

    #[test]
    fn iu_is_hermitian() {
        let f = FieldPair::new(C64::new(0.3, -0.2), C64::new(-0.1, 0.45));
        let nu = DetuningDistribution::sharp_line();
        let s = build_lax_pair(&f, &[AtomState::ground_minus()], &nu, 1.0, 7.5).unwrap();
        assert!(s.hermiticity_defect() < 1e-12);
    }
}
