//! Stokes parameters in the circular basis.
//!
//! Convention: `s0 = |Omega_+|^2 + |Omega_-|^2`, `s3 = |Omega_+|^2 - |Omega_-|^2`
//! and `s1 + i s2 = 2 conj(Omega_+) Omega_-`. `Handedness::Flipped` exchanges
//! the roles of the two circular components, which negates `s2` and `s3`.

use serde::{Deserialize, Serialize};

use crate::amplitudes::{FieldPair, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Handedness {
    #[default]
    Standard,
    Flipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesRecord {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesRecord {
    /// Unit polarization vector `(s1, s2, s3) / s0`; zero for no light.
    pub fn direction(&self) -> [f64; 3] {
        if self.s0 == 0.0 {
            return [0.0; 3];
        }
        [self.s1 / self.s0, self.s2 / self.s0, self.s3 / self.s0]
    }

    /// `|s1^2 + s2^2 + s3^2 - s0^2| / s0^2`.
    pub fn polarization_defect(&self) -> f64 {
        let v = self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3;
        (v - self.s0 * self.s0).abs() / (self.s0 * self.s0)
    }

    /// Angle on the Poincare sphere between this state and `other`.
    pub fn angle_to(&self, other: &StokesRecord) -> f64 {
        let a = self.direction();
        let b = other.direction();
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        dot.clamp(-1.0, 1.0).acos()
    }
}

pub fn stokes(omega_p: C64, omega_m: C64) -> StokesRecord {
    stokes_with(omega_p, omega_m, Handedness::Standard)
}

pub fn stokes_with(omega_p: C64, omega_m: C64, handedness: Handedness) -> StokesRecord {
    let (a, b) = match handedness {
        Handedness::Standard => (omega_p, omega_m),
        Handedness::Flipped => (omega_m, omega_p),
    };
    let cross = a.conj() * b * 2.0;
    StokesRecord {
        s0: a.norm_sqr() + b.norm_sqr(),
        s1: cross.re,
        s2: cross.im,
        s3: a.norm_sqr() - b.norm_sqr(),
    }
}

pub fn stokes_of(field: &FieldPair) -> StokesRecord {
    stokes(field.p, field.m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_circular() {
        let s = stokes(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        assert_eq!((s.s0, s.s1, s.s2, s.s3), (1.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn equal_superposition() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = stokes(C64::new(r, 0.0), C64::new(r, 0.0));
        assert!((s.s0 - 1.0).abs() < 1e-15);
        assert!((s.s1 - 1.0).abs() < 1e-15);
        assert!(s.s2.abs() < 1e-15 && s.s3.abs() < 1e-15);
    }

    #[test]
    fn flipped_handedness() {
        let a = stokes(C64::new(0.3, 0.1), C64::new(-0.2, 0.5));
        let b = stokes_with(C64::new(0.3, 0.1), C64::new(-0.2, 0.5), Handedness::Flipped);
        assert_eq!(a.s0, b.s0);
        assert_eq!(a.s1, b.s1);
        assert_eq!(a.s2, -b.s2);
        assert_eq!(a.s3, -b.s3);
    }
}
