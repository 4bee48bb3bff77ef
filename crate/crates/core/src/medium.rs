//! Medium description: coupling profile along the propagation coordinate and
//! the atomic data it can be derived from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{per_second_sq_to_mhz_sq, SPEED_OF_LIGHT};

/// Atomic and medium constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicData {
    /// Einstein A coefficient of the excited state, s^-1.
    pub einstein_a: f64,
    /// Atom number density, m^-3.
    pub density: f64,
    /// Optical wavelength, m.
    pub wavelength: f64,
    /// Longitudinal cross section of the medium, m^2. Only the mode rescaling
    /// uses it.
    pub cross_section: f64,
}

impl AtomicData {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("einstein_a", self.einstein_a),
            ("density", self.density),
            ("wavelength", self.wavelength),
            ("cross_section", self.cross_section),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Coupling `g = 3/(16 pi) c A n lambda^2`, returned in MHz^2.
///
/// Density is allowed to be zero here (empty medium gives `g = 0`); the
/// remaining quantities must be positive.
pub fn coupling_from_atomic_data(data: &AtomicData) -> Result<f64> {
    if !(data.einstein_a > 0.0) || !(data.wavelength > 0.0) || !(data.density >= 0.0) {
        return Err(Error::InvalidParameter(
            "A and lambda must be > 0 and n >= 0".into(),
        ));
    }
    let si = 3.0 / (16.0 * std::f64::consts::PI)
        * SPEED_OF_LIGHT
        * data.einstein_a
        * data.density
        * data.wavelength
        * data.wavelength;
    Ok(per_second_sq_to_mhz_sq(si))
}

/// Coupling strength `g(zeta)` in MHz^2 on a grid of retarded positions
/// `zeta` in microseconds. The medium starts at `zeta = 0`; `g` is linearly
/// interpolated between samples and vanishes outside the sampled interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileSamples", into = "ProfileSamples")]
pub struct MediumProfile {
    zeta: Vec<f64>,
    coupling: Vec<f64>,
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProfileSamples {
    zeta: Vec<f64>,
    coupling: Vec<f64>,
}

impl TryFrom<ProfileSamples> for MediumProfile {
    type Error = Error;

    fn try_from(raw: ProfileSamples) -> Result<Self> {
        Self::from_samples(raw.zeta, raw.coupling)
    }
}

impl From<MediumProfile> for ProfileSamples {
    fn from(m: MediumProfile) -> Self {
        ProfileSamples {
            zeta: m.zeta,
            coupling: m.coupling,
        }
    }
}

impl MediumProfile {
    /// Homogeneous medium occupying `0 <= zeta <= length`.
    pub fn uniform(coupling: f64, length: f64) -> Result<Self> {
        Self::from_samples(vec![0.0, length], vec![coupling, coupling])
    }

    pub fn vacuum() -> Self {
        Self::from_samples(vec![0.0, 1.0], vec![0.0, 0.0]).expect("valid vacuum profile")
    }

    pub fn from_samples(zeta: Vec<f64>, coupling: Vec<f64>) -> Result<Self> {
        if zeta.len() < 2 || zeta.len() != coupling.len() {
            return Err(Error::InvalidParameter(
                "medium profile needs >= 2 matching zeta/g samples".into(),
            ));
        }
        if zeta[0] != 0.0 {
            return Err(Error::InvalidParameter("medium profile must start at zeta = 0".into()));
        }
        if zeta.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidParameter("zeta samples must increase".into()));
        }
        if coupling.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidParameter("coupling must be finite and >= 0".into()));
        }
        let mut cumulative = Vec::with_capacity(zeta.len());
        cumulative.push(0.0);
        for j in 1..zeta.len() {
            let step = 0.5 * (coupling[j] + coupling[j - 1]) * (zeta[j] - zeta[j - 1]);
            cumulative.push(cumulative[j - 1] + step);
        }
        Ok(Self {
            zeta,
            coupling,
            cumulative,
        })
    }

    /// Derives `g(zeta)` from a density profile `n(zeta)` using the atomic
    /// constants in `data` (its own `density` field is ignored).
    pub fn from_density(zeta: Vec<f64>, density: &[f64], data: &AtomicData) -> Result<Self> {
        let coupling = density
            .iter()
            .map(|&n| coupling_from_atomic_data(&AtomicData { density: n, ..*data }))
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(zeta, coupling)
    }

    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    pub fn samples(&self) -> &[f64] {
        &self.coupling
    }

    pub fn length(&self) -> f64 {
        *self.zeta.last().expect("non-empty")
    }

    pub fn max_coupling(&self) -> f64 {
        self.coupling.iter().fold(0.0, |m: f64, g| m.max(*g))
    }

    fn locate(&self, zeta: f64) -> Option<(usize, f64)> {
        if !(zeta >= 0.0) || zeta > self.length() {
            return None;
        }
        let j = match self.zeta.partition_point(|&z| z <= zeta) {
            0 => 0,
            p => (p - 1).min(self.zeta.len() - 2),
        };
        let t = (zeta - self.zeta[j]) / (self.zeta[j + 1] - self.zeta[j]);
        Some((j, t))
    }

    /// `g(zeta)`, zero outside the medium.
    pub fn coupling_at(&self, zeta: f64) -> f64 {
        match self.locate(zeta) {
            Some((j, t)) => self.coupling[j] + t * (self.coupling[j + 1] - self.coupling[j]),
            None => 0.0,
        }
    }

    /// `int_0^zeta g(z) dz` for the piecewise-linear profile.
    pub fn integrated_coupling(&self, zeta: f64) -> f64 {
        if zeta <= 0.0 {
            return 0.0;
        }
        match self.locate(zeta) {
            Some((j, t)) => {
                let h = self.zeta[j + 1] - self.zeta[j];
                let g0 = self.coupling[j];
                let g1 = self.coupling[j + 1];
                self.cumulative[j] + h * (g0 * t + 0.5 * (g1 - g0) * t * t)
            }
            None => *self.cumulative.last().expect("non-empty"),
        }
    }
}
