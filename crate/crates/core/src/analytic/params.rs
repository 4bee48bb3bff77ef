use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four real constants of a single soliton: the complex spectral
/// parameter `xi + i eta` (MHz), the position constant `q0` and the phase
/// constant `phi0` (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct SolitonParams {
    pub(crate) xi: f64,
    pub(crate) eta: f64,
    pub(crate) q0: f64,
    pub(crate) phi0: f64,
}

#[derive(Deserialize)]
struct RawParams {
    xi: f64,
    eta: f64,
    #[serde(default)]
    q0: f64,
    #[serde(default)]
    phi0: f64,
}

impl TryFrom<RawParams> for SolitonParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        SolitonParams::new(r.xi, r.eta, r.q0, r.phi0)
    }
}

impl SolitonParams {
    pub fn new(xi: f64, eta: f64, q0: f64, phi0: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eta must be > 0 for a localized soliton, got {eta}"
            )));
        }
        if !xi.is_finite() || !q0.is_finite() || !phi0.is_finite() {
            return Err(Error::InvalidParameter("soliton constants must be finite".into()));
        }
        Ok(Self { xi, eta, q0, phi0 })
    }

    /// `xi + i eta = magnitude * exp(i theta)`.
    pub fn from_polar(magnitude: f64, theta: f64, q0: f64, phi0: f64) -> Result<Self> {
        Self::new(magnitude * theta.cos(), magnitude * theta.sin(), q0, phi0)
    }

    /// Soliton of the single-soliton figure: `|Omega| = 0.5 MHz` background,
    /// `xi + i eta = 10 exp(0.4 i pi)` MHz, `Q0 = Phi0 = 0`.
    pub fn figure1() -> Self {
        Self::from_polar(10.0, 0.4 * std::f64::consts::PI, 0.0, 0.0).expect("valid")
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn spectral(&self) -> Complex64 {
        Complex64::new(self.xi, self.eta)
    }

    /// `xi^2 + eta^2`.
    pub fn modulus_sqr(&self) -> f64 {
        self.xi * self.xi + self.eta * self.eta
    }

    /// Maximal polarization deviation `theta = arg(xi + i eta)`.
    pub fn theta(&self) -> f64 {
        self.eta.atan2(self.xi)
    }

    pub fn with_xi(&self, xi: f64) -> Result<Self> {
        Self::new(xi, self.eta, self.q0, self.phi0)
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.xi, eta, self.q0, self.phi0)
    }

    pub fn with_q0(&self, q0: f64) -> Self {
        Self { q0, ..*self }
    }

    pub fn with_phi0(&self, phi0: f64) -> Self {
        Self { phi0, ..*self }
    }

    /// Retarded-time interval over which `Q` changes by one at intensity
    /// `intensity` (MHz^2): `4 (xi^2 + eta^2) / (eta |Omega|^2)`, in us.
    pub fn tau_width(&self, intensity: f64) -> f64 {
        4.0 * self.modulus_sqr() / (self.eta * intensity)
    }

    /// `sum_k w_k eta / (2((xi - Delta_k)^2 + eta^2))`: rate of `Q` per unit
    /// integrated coupling.
    pub(crate) fn q_rate(&self, nu: &crate::detuning::DetuningDistribution) -> f64 {
        nu.integrate(|d| {
            let x = self.xi - d;
            self.eta / (2.0 * (x * x + self.eta * self.eta))
        })
    }

    /// `sum_k w_k (xi - Delta_k) / (2((xi - Delta_k)^2 + eta^2))`.
    pub(crate) fn phi_rate(&self, nu: &crate::detuning::DetuningDistribution) -> f64 {
        nu.integrate(|d| {
            let x = self.xi - d;
            x / (2.0 * (x * x + self.eta * self.eta))
        })
    }

    /// Propagation distance (us) over which `Q` changes by one in a medium
    /// of constant coupling `g`.
    pub fn zeta_width(&self, coupling: f64, nu: &crate::detuning::DetuningDistribution) -> f64 {
        1.0 / (self.q_rate(nu) * coupling)
    }
}
