//! Field and atom amplitude containers shared by the analytic and numerical
//! solvers. The atomic basis order is `(e, +, -)` throughout the crate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// Rabi frequencies of the two circular polarization components, MHz.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldPair {
    pub p: C64,
    pub m: C64,
}

impl FieldPair {
    pub const ZERO: FieldPair = FieldPair {
        p: C64::new(0.0, 0.0),
        m: C64::new(0.0, 0.0),
    };

    pub fn new(p: C64, m: C64) -> Self {
        Self { p, m }
    }

    /// `|Omega_+|^2 + |Omega_-|^2`.
    pub fn intensity(&self) -> f64 {
        self.p.norm_sqr() + self.m.norm_sqr()
    }

    pub fn magnitude(&self) -> f64 {
        self.intensity().sqrt()
    }

    pub fn lerp(&self, other: &FieldPair, t: f64) -> FieldPair {
        FieldPair {
            p: self.p + (other.p - self.p) * t,
            m: self.m + (other.m - self.m) * t,
        }
    }

    pub fn scale(&self, s: C64) -> FieldPair {
        FieldPair {
            p: self.p * s,
            m: self.m * s,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.m.is_finite()
    }
}

/// Pure-state probability amplitudes `(psi_e, psi_+, psi_-)` of one atom.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AtomState {
    pub e: C64,
    pub p: C64,
    pub m: C64,
}

impl AtomState {
    pub fn new(e: C64, p: C64, m: C64) -> Self {
        Self { e, p, m }
    }

    pub fn ground_minus() -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.e.norm_sqr() + self.p.norm_sqr() + self.m.norm_sqr()
    }

    /// `Omega_+ psi_+ + Omega_- psi_-`; zero for a dark state.
    pub fn bright_coupling(&self, field: &FieldPair) -> C64 {
        field.p * self.p + field.m * self.m
    }

    pub fn as_array(&self) -> [C64; 3] {
        [self.e, self.p, self.m]
    }

    pub fn is_finite(&self) -> bool {
        self.e.is_finite() && self.p.is_finite() && self.m.is_finite()
    }

    pub(crate) fn axpy(&self, a: f64, k: &AtomState) -> AtomState {
        AtomState {
            e: self.e + k.e * a,
            p: self.p + k.p * a,
            m: self.m + k.m * a,
        }
    }
}
