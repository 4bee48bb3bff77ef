//! The control envelope `Omega(tau)` on a uniform retarded-time grid.

use serde::{Deserialize, Serialize};

use crate::amplitudes::C64;
use crate::error::{Error, Result};

/// Smooth switch-off / hold / switch-on envelope for stop-and-retrieve runs.
///
/// The envelope is one before `t_off`, falls to zero over `edge` with a C1
/// smoothstep, stays exactly zero for `t_hold`, and rises back over `edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSpec {
    pub t_off: f64,
    pub t_hold: f64,
    pub edge: f64,
}

impl RampSpec {
    /// Start of the interval where the field is exactly zero.
    pub fn dark_start(&self) -> f64 {
        self.t_off + self.edge
    }

    /// End of the interval where the field is exactly zero.
    pub fn dark_end(&self) -> f64 {
        self.dark_start() + self.t_hold
    }

    pub fn envelope(&self, tau: f64) -> f64 {
        let smoothstep = |x: f64| {
            let x = x.clamp(0.0, 1.0);
            x * x * (3.0 - 2.0 * x)
        };
        if tau <= self.t_off {
            1.0
        } else if tau < self.dark_start() {
            1.0 - smoothstep((tau - self.t_off) / self.edge)
        } else if tau <= self.dark_end() {
            0.0
        } else {
            smoothstep((tau - self.dark_end()) / self.edge)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundField {
    tau0: f64,
    dtau: f64,
    samples: Vec<C64>,
    // prefix[i] = int_{tau0}^{tau_i} |Omega|^2 (trapezoid)
    prefix: Vec<f64>,
    anchor: f64,
}

impl BackgroundField {
    pub fn from_samples(tau0: f64, dtau: f64, samples: Vec<C64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter("background needs >= 2 samples".into()));
        }
        if !(dtau > 0.0) || !dtau.is_finite() || !tau0.is_finite() {
            return Err(Error::InvalidParameter("background grid spacing must be > 0".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("background samples must be finite".into()));
        }
        let mut prefix = Vec::with_capacity(samples.len());
        prefix.push(0.0);
        for i in 1..samples.len() {
            let step = 0.5 * (samples[i - 1].norm_sqr() + samples[i].norm_sqr()) * dtau;
            prefix.push(prefix[i - 1] + step);
        }
        let mut field = Self {
            tau0,
            dtau,
            samples,
            prefix,
            anchor: 0.0,
        };
        field.anchor = field.raw_cumulative(0.0);
        Ok(field)
    }

    /// Samples `f` at `n` points spanning `[tau_min, tau_max]`.
    pub fn from_fn(tau_min: f64, tau_max: f64, n: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        if n < 2 || !(tau_max > tau_min) {
            return Err(Error::InvalidParameter("need n >= 2 and tau_max > tau_min".into()));
        }
        let dtau = (tau_max - tau_min) / (n - 1) as f64;
        let samples = (0..n).map(|i| f(tau_min + i as f64 * dtau)).collect();
        Self::from_samples(tau_min, dtau, samples)
    }

    pub fn constant(omega: C64, tau_min: f64, tau_max: f64, n: usize) -> Result<Self> {
        Self::from_fn(tau_min, tau_max, n, |_| omega)
    }

    pub fn ramp(omega: C64, tau_min: f64, tau_max: f64, n: usize, ramp: RampSpec) -> Result<Self> {
        if !(ramp.edge > 0.0) || !(ramp.t_hold >= 0.0) {
            return Err(Error::InvalidParameter("ramp needs edge > 0 and t_hold >= 0".into()));
        }
        Self::from_fn(tau_min, tau_max, n, |t| omega * ramp.envelope(t))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn tau_max(&self) -> f64 {
        self.tau(self.len() - 1)
    }

    pub fn tau(&self, i: usize) -> f64 {
        self.tau0 + i as f64 * self.dtau
    }

    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.tau(i))
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn max_intensity(&self) -> f64 {
        self.samples.iter().fold(0.0, |m: f64, s| m.max(s.norm_sqr()))
    }

    pub fn contains(&self, tau: f64) -> bool {
        let slack = 1e-9 * self.dtau;
        tau >= self.tau0 - slack && tau <= self.tau_max() + slack
    }

    fn cell(&self, tau: f64) -> (usize, f64) {
        let x = ((tau - self.tau0) / self.dtau).max(0.0);
        let i = (x.floor() as usize).min(self.len() - 2);
        (i, (x - i as f64).clamp(0.0, 1.0))
    }

    /// `Omega(tau)` by linear interpolation.
    pub fn field_at(&self, tau: f64) -> Result<C64> {
        if !self.contains(tau) {
            return Err(Error::OutOfGrid(format!(
                "tau = {tau} outside background grid [{}, {}]",
                self.tau0,
                self.tau_max()
            )));
        }
        let (i, t) = self.cell(tau);
        Ok(self.samples[i] + (self.samples[i + 1] - self.samples[i]) * t)
    }

    /// Integral of the piecewise-linear `|Omega|^2` from `tau0`; the edge
    /// intensities are continued as constants outside the grid.
    fn raw_cumulative(&self, tau: f64) -> f64 {
        let n = self.len();
        if tau <= self.tau0 {
            return (tau - self.tau0) * self.samples[0].norm_sqr();
        }
        if tau >= self.tau_max() {
            return self.prefix[n - 1] + (tau - self.tau_max()) * self.samples[n - 1].norm_sqr();
        }
        let (i, t) = self.cell(tau);
        let a = self.samples[i].norm_sqr();
        let b = self.samples[i + 1].norm_sqr();
        self.prefix[i] + self.dtau * (a * t + 0.5 * (b - a) * t * t)
    }

    /// `I(tau) = int_0^tau |Omega|^2 dtau'`, MHz^2 us. Negative for `tau < 0`.
    pub fn cumulative_intensity(&self, tau: f64) -> f64 {
        self.raw_cumulative(tau) - self.anchor
    }

    /// Cumulative intensity at grid index `i` (exact trapezoid prefix).
    pub fn cumulative_at(&self, i: usize) -> f64 {
        self.prefix[i] - self.anchor
    }

    /// Smallest grid time at which the cumulative intensity reaches `target`,
    /// refined linearly within the cell.
    pub fn tau_at_cumulative(&self, target: f64) -> Option<f64> {
        let raw = target + self.anchor;
        let j = self.prefix.partition_point(|&p| p < raw);
        if j == 0 || j >= self.len() {
            return None;
        }
        let (p0, p1) = (self.prefix[j - 1], self.prefix[j]);
        let t = if p1 > p0 { (raw - p0) / (p1 - p0) } else { 0.0 };
        Some(self.tau(j - 1) + t * self.dtau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_cumulative_is_exact_and_anchored() {
        let b = BackgroundField::constant(C64::new(0.3, 0.4), -10.0, 10.0, 201).unwrap();
        assert_eq!(b.cumulative_intensity(0.0), 0.0);
        for &t in &[-10.0, -3.3, 0.05, 7.77, 10.0] {
            assert!((b.cumulative_intensity(t) - 0.25 * t).abs() < 1e-12);
        }
        assert!((b.tau_at_cumulative(1.0).unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn cumulative_monotone() {
        let ramp = RampSpec {
            t_off: -2.0,
            t_hold: 3.0,
            edge: 1.0,
        };
        let b = BackgroundField::ramp(C64::new(1.0, 0.0), -10.0, 10.0, 401, ramp).unwrap();
        let mut last = f64::NEG_INFINITY;
        for t in b.taus() {
            let i = b.cumulative_intensity(t);
            assert!(i >= last);
            last = i;
        }
        assert_eq!(b.field_at(0.0).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(ramp.envelope(-5.0), 1.0);
        assert_eq!(ramp.envelope(9.0), 1.0);
    }

    #[test]
    fn out_of_grid_rejected() {
        let b = BackgroundField::constant(C64::new(1.0, 0.0), 0.0, 1.0, 11).unwrap();
        assert!(b.field_at(1.5).is_err());
        assert!(b.field_at(-0.5).is_err());
    }
}
