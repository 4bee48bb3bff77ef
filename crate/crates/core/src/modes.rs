//! Fluctuation (Goldstone) modes of the soliton and their symplectic
//! structure.
//!
//! The bracket of two modes is
//! `{a, b} = (1/8i) int sum_± (conj(dOmega/da) dOmega/db - dOmega/da conj(dOmega/db)) dtau`
//! `= (1/4) int sum_± Im(conj(dOmega/da) dOmega/db) dtau`, evaluated with the
//! trapezoid rule. The canonical pattern is `{Q0, xi} = {Phi0, eta} = 1` with
//! every other independent pair zero.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::amplitudes::C64;
use crate::analytic::{BackgroundField, SolitonParams, SolitonSolution};
use crate::detuning::DetuningDistribution;
use crate::error::{Error, Result};
use crate::medium::MediumProfile;
use crate::units::{EPSILON_0, HBAR, HZ_PER_MHZ, SPEED_OF_LIGHT};

/// Relative agreement required between successive step halvings.
pub const HALVING_TOLERANCE: f64 = 1e-4;
/// Localized modes must fall below this fraction of their peak at the edges.
pub const EDGE_TOLERANCE: f64 = 1e-6;

const MAX_HALVINGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeParam {
    Xi,
    Eta,
    Q0,
    Phi0,
}

impl ModeParam {
    /// Matrix ordering `(xi, eta, Q0, Phi0)`.
    pub const ALL: [ModeParam; 4] = [ModeParam::Xi, ModeParam::Eta, ModeParam::Q0, ModeParam::Phi0];

    pub fn index(self) -> usize {
        match self {
            ModeParam::Xi => 0,
            ModeParam::Eta => 1,
            ModeParam::Q0 => 2,
            ModeParam::Phi0 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModeParam::Xi => "xi",
            ModeParam::Eta => "eta",
            ModeParam::Q0 => "Q0",
            ModeParam::Phi0 => "Phi0",
        }
    }

    /// Whether the mode decays on both sides of the soliton. The `xi` and
    /// `eta` modes approach the derivative of the asymptotic geometric phase
    /// on one side and do not.
    pub fn is_localized(self) -> bool {
        matches!(self, ModeParam::Q0 | ModeParam::Phi0)
    }

    fn get(self, p: &SolitonParams) -> f64 {
        match self {
            ModeParam::Xi => p.xi(),
            ModeParam::Eta => p.eta(),
            ModeParam::Q0 => p.q0(),
            ModeParam::Phi0 => p.phi0(),
        }
    }

    fn set(self, p: &SolitonParams, value: f64) -> Result<SolitonParams> {
        match self {
            ModeParam::Xi => p.with_xi(value),
            ModeParam::Eta => p.with_eta(value),
            ModeParam::Q0 => Ok(p.with_q0(value)),
            ModeParam::Phi0 => Ok(p.with_phi0(value)),
        }
    }

    fn base_step(self, p: &SolitonParams) -> f64 {
        match self {
            ModeParam::Xi | ModeParam::Eta => 1e-3 * p.modulus_sqr().sqrt(),
            ModeParam::Q0 | ModeParam::Phi0 => 1e-3,
        }
    }
}

impl fmt::Display for ModeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeMethod {
    /// Closed-form derivative; available for `Q0` and `Phi0` only.
    Analytic,
    /// Central differences with step halving and Richardson extrapolation.
    #[default]
    CentralDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationMode {
    pub param: ModeParam,
    pub tau0: f64,
    pub dtau: f64,
    pub d_plus: Vec<C64>,
    pub d_minus: Vec<C64>,
}

impl FluctuationMode {
    pub fn len(&self) -> usize {
        self.d_plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_plus.is_empty()
    }

    pub fn magnitude(&self, i: usize) -> f64 {
        (self.d_plus[i].norm_sqr() + self.d_minus[i].norm_sqr()).sqrt()
    }

    pub fn peak(&self) -> f64 {
        (0..self.len()).map(|i| self.magnitude(i)).fold(0.0, f64::max)
    }

    /// Larger of the two edge magnitudes relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        self.magnitude(0).max(self.magnitude(self.len() - 1)) / peak
    }
}

fn slice(params: &SolitonParams, bg: &BackgroundField, medium: &MediumProfile, nu: &DetuningDistribution, zeta: f64) -> (Vec<C64>, Vec<C64>) {
    let sol = SolitonSolution::new(*params, bg, medium, nu);
    sol.field_slice(zeta).into_iter().map(|f| (f.p, f.m)).unzip()
}

fn difference(
    param: ModeParam,
    params: &SolitonParams,
    bg: &BackgroundField,
    medium: &MediumProfile,
    nu: &DetuningDistribution,
    zeta: f64,
    h: f64,
) -> Result<(Vec<C64>, Vec<C64>)> {
    let x = param.get(params);
    let (pp, pm) = slice(&param.set(params, x + h)?, bg, medium, nu, zeta);
    let (mp, mm) = slice(&param.set(params, x - h)?, bg, medium, nu, zeta);
    let inv = 1.0 / (2.0 * h);
    let dp = pp.iter().zip(&mp).map(|(a, b)| (a - b) * inv).collect();
    let dm = pm.iter().zip(&mm).map(|(a, b)| (a - b) * inv).collect();
    Ok((dp, dm))
}

fn max_diff(a: &(Vec<C64>, Vec<C64>), b: &(Vec<C64>, Vec<C64>)) -> f64 {
    let d = |x: &[C64], y: &[C64]| x.iter().zip(y).fold(0.0, |m: f64, (u, v)| m.max((u - v).norm()));
    d(&a.0, &b.0).max(d(&a.1, &b.1))
}

fn max_abs(a: &(Vec<C64>, Vec<C64>)) -> f64 {
    a.0.iter().chain(&a.1).fold(0.0, |m: f64, z| m.max(z.norm()))
}

/// `dOmega_±/d alpha` on the background grid at `zeta`.
pub fn mode_field(
    params: &SolitonParams,
    background: &BackgroundField,
    medium: &MediumProfile,
    nu: &DetuningDistribution,
    param: ModeParam,
    zeta: f64,
    method: ModeMethod,
) -> Result<FluctuationMode> {
    let (d_plus, d_minus) = match method {
        ModeMethod::Analytic => {
            if !param.is_localized() {
                return Err(Error::InvalidParameter(format!(
                    "no closed-form mode for {param}; use central differences"
                )));
            }
            let sol = SolitonSolution::new(*params, background, medium, nu);
            let s = params.spectral();
            (0..background.len())
                .map(|i| {
                    let st = sol.state_at_index(i, zeta);
                    let omega = background.samples()[i];
                    match param {
                        ModeParam::Q0 => {
                            let sech = 1.0 / st.q.cosh();
                            let dp = omega * C64::new(0.0, -params.eta() * sech * sech) / s;
                            (dp, -st.field.m * st.q.tanh())
                        }
                        _ => (C64::new(0.0, 0.0), st.field.m * C64::new(0.0, -1.0)),
                    }
                })
                .unzip()
        }
        ModeMethod::CentralDifference => {
            let mut h = param.base_step(params);
            let mut coarse = difference(param, params, background, medium, nu, zeta, h)?;
            let mut relative = f64::INFINITY;
            let mut found = None;
            for _ in 0..MAX_HALVINGS {
                h *= 0.5;
                let fine = difference(param, params, background, medium, nu, zeta, h)?;
                let scale = max_abs(&fine);
                relative = if scale > 0.0 { max_diff(&coarse, &fine) / scale } else { 0.0 };
                if relative <= HALVING_TOLERANCE {
                    let extrapolate = |f: &[C64], c: &[C64]| -> Vec<C64> {
                        f.iter().zip(c).map(|(a, b)| a + (a - b) / 3.0).collect()
                    };
                    found = Some((extrapolate(&fine.0, &coarse.0), extrapolate(&fine.1, &coarse.1)));
                    break;
                }
                coarse = fine;
            }
            found.ok_or(Error::UnstableDerivative {
                parameter: param.name(),
                relative,
            })?
        }
    };
    Ok(FluctuationMode {
        param,
        tau0: background.tau0(),
        dtau: background.dtau(),
        d_plus,
        d_minus,
    })
}

/// Antisymmetric bracket matrix in the order `(xi, eta, Q0, Phi0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketMatrix(pub [[f64; 4]; 4]);

impl BracketMatrix {
    pub fn canonical() -> Self {
        let mut m = [[0.0; 4]; 4];
        m[2][0] = 1.0;
        m[0][2] = -1.0;
        m[3][1] = 1.0;
        m[1][3] = -1.0;
        BracketMatrix(m)
    }

    pub fn get(&self, a: ModeParam, b: ModeParam) -> f64 {
        self.0[a.index()][b.index()]
    }

    /// Sets `{a, b}` and `{b, a} = -{a, b}`.
    pub fn set(&mut self, a: ModeParam, b: ModeParam, value: f64) {
        self.0[a.index()][b.index()] = value;
        self.0[b.index()][a.index()] = -value;
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                d = d.max((self.0[r][c] + self.0[c][r]).abs());
            }
        }
        d
    }
}

fn bracket(a: &FluctuationMode, b: &FluctuationMode) -> f64 {
    let n = a.len();
    let term = |i: usize| {
        (a.d_plus[i].conj() * b.d_plus[i]).im + (a.d_minus[i].conj() * b.d_minus[i]).im
    };
    let mut sum = 0.5 * (term(0) + term(n - 1));
    for i in 1..n - 1 {
        sum += term(i);
    }
    0.25 * sum * a.dtau
}

/// Brackets of all pairs. Only the upper triangle is integrated, so the
/// result is antisymmetric exactly and the diagonal is zero.
pub fn bracket_matrix(modes: &[FluctuationMode]) -> Result<BracketMatrix> {
    let mut ordered: [Option<&FluctuationMode>; 4] = [None; 4];
    for m in modes {
        ordered[m.param.index()] = Some(m);
    }
    let ordered: Vec<&FluctuationMode> = ordered
        .iter()
        .enumerate()
        .map(|(k, m)| m.ok_or_else(|| Error::InvalidParameter(format!("missing {} mode", ModeParam::ALL[k]))))
        .collect::<Result<_>>()?;
    let n = ordered[0].len();
    if n < 3 {
        return Err(Error::GridTooShort("bracket needs at least three tau samples".into()));
    }
    for m in &ordered {
        if m.len() != n || m.d_minus.len() != n || m.dtau != ordered[0].dtau {
            return Err(Error::InvalidParameter("modes are not on a common tau grid".into()));
        }
        if m.param.is_localized() && m.edge_ratio() > EDGE_TOLERANCE {
            return Err(Error::GridTooShort(format!(
                "{} mode is {:.2e} of its peak at the window edge",
                m.param,
                m.edge_ratio()
            )));
        }
    }
    let mut out = BracketMatrix([[0.0; 4]; 4]);
    for r in 0..4 {
        for c in r + 1..4 {
            out.set(ModeParam::ALL[r], ModeParam::ALL[c], bracket(ordered[r], ordered[c]));
        }
    }
    Ok(out)
}

/// All four modes at `zeta`, with the closed form used for `Q0` and `Phi0`.
pub fn all_modes(
    params: &SolitonParams,
    background: &BackgroundField,
    medium: &MediumProfile,
    nu: &DetuningDistribution,
    zeta: f64,
) -> Result<Vec<FluctuationMode>> {
    ModeParam::ALL
        .iter()
        .map(|&p| {
            let method = if p.is_localized() {
                ModeMethod::Analytic
            } else {
                ModeMethod::CentralDifference
            };
            mode_field(params, background, medium, nu, p, zeta, method)
        })
        .collect()
}

/// Dipole moment `kappa` (C m), carrier angular frequency `omega` (1/s) and
/// cross-section `sigma` (m^2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumScale {
    pub kappa: f64,
    pub omega: f64,
    pub sigma: f64,
}

impl QuantumScale {
    pub fn new(kappa: f64, omega: f64, sigma: f64) -> Result<Self> {
        let s = Self { kappa, omega, sigma };
        s.factor_mhz()?;
        Ok(s)
    }

    /// `kappa^2 omega / (16 eps0 hbar sigma c)` in MHz.
    pub fn factor_mhz(&self) -> Result<f64> {
        let f = self.kappa * self.kappa * self.omega / (16.0 * EPSILON_0 * HBAR * self.sigma * SPEED_OF_LIGHT) / HZ_PER_MHZ;
        if f.is_finite() && f > 0.0 {
            Ok(f)
        } else {
            Err(Error::InvalidParameter(format!("quantum rescale factor {f} must be positive")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub a: ModeParam,
    pub b: ModeParam,
    pub value: f64,
    pub expected: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub matrix: BracketMatrix,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub pairs: Vec<PairCheck>,
    /// Names of the pairs that miss the canonical value.
    pub failures: Vec<String>,
    pub pass: bool,
    pub rescale_factor_mhz: Option<f64>,
    pub xi0: Option<f64>,
    pub eta0: Option<f64>,
    /// Heisenberg pairing implied by the bracket pattern.
    pub pairing: Vec<(String, String, bool)>,
}

/// Compares `m` with the canonical pattern pair by pair and, given a scale,
/// reports the dimensionless spectral parameter.
pub fn symplectic_check_and_rescale(m: &BracketMatrix, params: &SolitonParams, scale: Option<&QuantumScale>, tolerance: f64) -> ModeReport {
    let canon = BracketMatrix::canonical();
    let mut pairs = Vec::new();
    let mut failures = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for r in 0..4 {
        for c in r + 1..4 {
            let (a, b) = (ModeParam::ALL[c], ModeParam::ALL[r]);
            let value = m.get(a, b);
            let expected = canon.get(a, b);
            let dev = (value - expected).abs();
            max_deviation = max_deviation.max(dev);
            let pass = dev <= tolerance;
            if !pass {
                failures.push(format!("{{{a},{b}}} = {value:.6} (expected {expected})"));
            }
            pairs.push(PairCheck {
                a,
                b,
                value,
                expected,
                pass,
            });
        }
    }
    let pair_ok = |a: ModeParam, b: ModeParam| (m.get(a, b) - 1.0).abs() <= tolerance;
    let pairing = vec![
        ("Q0".to_string(), "xi0".to_string(), pair_ok(ModeParam::Q0, ModeParam::Xi)),
        ("Phi0".to_string(), "eta0".to_string(), pair_ok(ModeParam::Phi0, ModeParam::Eta)),
    ];
    let factor = scale.and_then(|s| s.factor_mhz().ok());
    ModeReport {
        matrix: *m,
        tolerance,
        max_deviation,
        pass: failures.is_empty(),
        pairs,
        failures,
        rescale_factor_mhz: factor,
        xi0: factor.map(|f| params.xi() / f),
        eta0: factor.map(|f| params.eta() / f),
        pairing,
    }
}

/// Mode profiles as CSV: `tau_us` then `re/im` of `dOmega_±` for each mode.
pub fn write_modes_csv<W: Write>(w: &mut W, modes: &[FluctuationMode], provenance: &str) -> std::io::Result<()> {
    writeln!(w, "# {provenance}")?;
    write!(w, "tau_us")?;
    for m in modes {
        let n = m.param.name();
        write!(w, ",re_d{n}_p,im_d{n}_p,re_d{n}_m,im_d{n}_m")?;
    }
    writeln!(w)?;
    let Some(first) = modes.first() else {
        return Ok(());
    };
    for i in 0..first.len() {
        write!(w, "{:e}", first.tau0 + i as f64 * first.dtau)?;
        for m in modes {
            write!(w, ",{:e},{:e},{:e},{:e}", m.d_plus[i].re, m.d_plus[i].im, m.d_minus[i].re, m.d_minus[i].im)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_bracket_csv<W: Write>(w: &mut W, m: &BracketMatrix, provenance: &str) -> std::io::Result<()> {
    writeln!(w, "# {provenance}")?;
    writeln!(w, "alpha,xi,eta,Q0,Phi0")?;
    for (r, p) in ModeParam::ALL.iter().enumerate() {
        writeln!(w, "{},{:e},{:e},{:e},{:e}", p.name(), m.0[r][0], m.0[r][1], m.0[r][2], m.0[r][3])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_matrix_passes() {
        let r = symplectic_check_and_rescale(&BracketMatrix::canonical(), &SolitonParams::figure1(), None, 1e-12);
        assert!(r.pass);
        assert_eq!(r.max_deviation, 0.0);
    }

    #[test]
    fn forced_pair_fails_by_name() {
        let mut m = BracketMatrix::canonical();
        m.set(ModeParam::Xi, ModeParam::Eta, 0.5);
        let r = symplectic_check_and_rescale(&m, &SolitonParams::figure1(), None, 1e-2);
        assert!(!r.pass);
        assert_eq!(r.failures.len(), 1);
        assert!(r.failures[0].contains("eta") && r.failures[0].contains("xi"), "{:?}", r.failures);
    }

    #[test]
    fn rescale_factor_positive() {
        assert!(QuantumScale::new(1e-29, 3e15, 1e-13).unwrap().factor_mhz().unwrap() > 0.0);
        assert!(QuantumScale::new(1e-29, -3e15, 1e-13).is_err());
    }
}
