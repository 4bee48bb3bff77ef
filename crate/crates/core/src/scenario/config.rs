//! Scenario configuration: one JSON document, optionally patched with
//! dotted `key=value` overrides.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::amplitudes::C64;
use crate::analytic::{BackgroundField, RampSpec, SolitonParams};
use crate::detuning::{DetuningDistribution, LineShape};
use crate::dynamics::atom::RESOLUTION_LIMIT;
use crate::dynamics::checkpoint::Precision;
use crate::error::{Error, Result};
use crate::medium::{coupling_from_atomic_data, AtomicData, MediumProfile};
use crate::modes::QuantumScale;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    #[default]
    Figure1,
    Oracle,
    StopRetrieve,
    Lax,
    Modes,
    Feasibility,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::Figure1,
        ScenarioKind::Oracle,
        ScenarioKind::StopRetrieve,
        ScenarioKind::Lax,
        ScenarioKind::Modes,
        ScenarioKind::Feasibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Figure1 => "figure1",
            ScenarioKind::Oracle => "oracle",
            ScenarioKind::StopRetrieve => "stop-retrieve",
            ScenarioKind::Lax => "lax",
            ScenarioKind::Modes => "modes",
            ScenarioKind::Feasibility => "feasibility",
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scenario {s:?}")))
    }
}

/// Control envelope. Amplitudes in MHz, times in us.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackgroundSpec {
    Constant {
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Smoothstep switch-off at `t_off`, dark for `t_hold`, back on. `t_on`
    /// (start of the rise) is implied by the other three; if given it must
    /// agree.
    Ramp {
        omega: f64,
        #[serde(default)]
        phase: f64,
        t_off: f64,
        t_hold: f64,
        edge: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_on: Option<f64>,
    },
    /// Tabulated envelope; overrides the tau grid.
    Sampled {
        tau0: f64,
        dtau: f64,
        re: Vec<f64>,
        im: Vec<f64>,
    },
}

impl BackgroundSpec {
    pub fn omega(&self) -> C64 {
        match self {
            BackgroundSpec::Constant { omega, phase } | BackgroundSpec::Ramp { omega, phase, .. } => {
                C64::from_polar(*omega, *phase)
            }
            BackgroundSpec::Sampled { re, im, .. } => re
                .iter()
                .zip(im)
                .map(|(a, b)| C64::new(*a, *b))
                .fold(C64::new(0.0, 0.0), |m, z| if z.norm() > m.norm() { z } else { m }),
        }
    }

    pub fn ramp(&self) -> Result<Option<RampSpec>> {
        let BackgroundSpec::Ramp {
            t_off,
            t_hold,
            edge,
            t_on,
            ..
        } = self
        else {
            return Ok(None);
        };
        let ramp = RampSpec {
            t_off: *t_off,
            t_hold: *t_hold,
            edge: *edge,
        };
        if let Some(on) = t_on {
            if (on - ramp.dark_end()).abs() > 1e-9 * (1.0 + on.abs()) {
                return Err(Error::InvalidParameter(format!(
                    "ramp t_on = {on} disagrees with t_off + edge + t_hold = {}",
                    ramp.dark_end()
                )));
            }
        }
        Ok(Some(ramp))
    }
}

impl Default for BackgroundSpec {
    fn default() -> Self {
        BackgroundSpec::Constant {
            omega: 0.5,
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetuningSpec {
    pub shape: LineShape,
    pub nodes: usize,
    /// Only for `shape.kind = "custom"`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub custom_nodes: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub custom_weights: Vec<f64>,
}

impl Default for DetuningSpec {
    fn default() -> Self {
        Self {
            shape: LineShape::SharpLine,
            nodes: 1,
            custom_nodes: Vec::new(),
            custom_weights: Vec::new(),
        }
    }
}

impl DetuningSpec {
    pub fn build(&self) -> Result<DetuningDistribution> {
        match self.shape {
            LineShape::Custom => DetuningDistribution::custom(self.custom_nodes.clone(), self.custom_weights.clone()),
            shape => DetuningDistribution::new(shape, self.nodes),
        }
    }
}

/// Coupling along the medium. Without an explicit length the medium extends
/// to twice the march distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MediumSpec {
    Uniform {
        coupling: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<f64>,
    },
    Samples {
        zeta: Vec<f64>,
        coupling: Vec<f64>,
    },
    Atomic {
        data: AtomicData,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<f64>,
    },
}

impl Default for MediumSpec {
    fn default() -> Self {
        MediumSpec::Uniform {
            coupling: 50.0,
            length: None,
        }
    }
}

impl MediumSpec {
    /// Peak coupling in MHz^2.
    pub fn coupling(&self) -> Result<f64> {
        match self {
            MediumSpec::Uniform { coupling, .. } => Ok(*coupling),
            MediumSpec::Samples { coupling, .. } => Ok(coupling.iter().fold(0.0, |m: f64, g| m.max(*g))),
            MediumSpec::Atomic { data, .. } => coupling_from_atomic_data(data),
        }
    }

    pub fn build(&self, zeta_end: f64) -> Result<MediumProfile> {
        let default_length = 2.0 * zeta_end.max(f64::MIN_POSITIVE);
        match self {
            MediumSpec::Uniform { coupling, length } => {
                MediumProfile::uniform(*coupling, length.unwrap_or(default_length))
            }
            MediumSpec::Samples { zeta, coupling } => MediumProfile::from_samples(zeta.clone(), coupling.clone()),
            MediumSpec::Atomic { data, length } => {
                data.validate()?;
                MediumProfile::uniform(coupling_from_atomic_data(data)?, length.unwrap_or(default_length))
            }
        }
    }
}

/// Retarded-time and propagation grids, sized in soliton widths unless an
/// absolute value is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n_tau: usize,
    pub tau_half_span_widths: f64,
    pub tau_center: f64,
    pub n_zeta: usize,
    pub zeta_end_widths: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta_end: Option<f64>,
    /// Atomic RK4 substeps per tau cell; derived from the field when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substeps: Option<usize>,
    pub checkpoint_stride: usize,
    /// Shift the launch position by half the drift so the soliton moves
    /// symmetrically about `tau_center`.
    pub center_drift: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_tau: 4096,
            tau_half_span_widths: 12.0,
            tau_center: 0.0,
            n_zeta: 256,
            zeta_end_widths: 3.0,
            zeta_end: None,
            substeps: None,
            checkpoint_stride: 1,
            center_drift: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Bin,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "bin" | "binary" => Ok(OutputFormat::Bin),
            _ => Err(Error::InvalidParameter(format!("unknown format {s:?} (csv|json|bin)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: String,
    pub format: OutputFormat,
    pub precision: Precision,
    /// Binary histories carry atom amplitudes too (large).
    pub include_atoms: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            format: OutputFormat::Csv,
            precision: Precision::Complex128,
            include_atoms: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure1Spec {
    /// Strip half span; the Stokes edge check needs about 20 widths.
    pub half_span_widths: f64,
    pub zeta: f64,
    pub intensity_tolerance: f64,
    pub stokes_tolerance: f64,
    pub phase_tolerance: f64,
    pub edge_tolerance: f64,
}

impl Default for Figure1Spec {
    fn default() -> Self {
        Self {
            half_span_widths: 20.0,
            zeta: 0.0,
            intensity_tolerance: 1e-12,
            stokes_tolerance: 1e-10,
            phase_tolerance: 1e-9,
            edge_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSpec {
    /// `(|Omega|, g)` pairs for the velocity law; empty skips it.
    pub velocity_cases: Vec<[f64; 2]>,
    pub velocity_tolerance: f64,
    /// Companion run at twice the intensity ratio on the same grids.
    pub r_test: bool,
    pub r_ratio_min: f64,
    /// Grid halving is done at `h_intensity_scale * |Omega|^2`, where the
    /// discretization error dominates the closed form's own error.
    pub h_test: bool,
    pub h_intensity_scale: f64,
    pub h_ratio_min: f64,
    pub conservation_tolerance: f64,
    /// Repeat the base run on a doubled grid to measure the conservation order.
    pub conservation_refinement: bool,
    pub conservation_ratio_min: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            velocity_cases: vec![[0.5, 50.0], [0.5, 100.0], [0.7, 50.0]],
            velocity_tolerance: 0.02,
            r_test: true,
            r_ratio_min: 1.8,
            h_test: true,
            h_intensity_scale: 0.25,
            h_ratio_min: 3.0,
            conservation_tolerance: 1e-6,
            conservation_refinement: true,
            conservation_ratio_min: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StopRetrieveSpec {
    pub holds: Vec<f64>,
    pub edge: f64,
    /// Retarded time at which the field first reaches zero.
    pub dark_start: f64,
    pub frozen_tolerance: f64,
    pub position_tolerance: f64,
}

impl Default for StopRetrieveSpec {
    fn default() -> Self {
        Self {
            holds: vec![50.0, 100.0],
            edge: 40.0,
            dark_start: -50.0,
            frozen_tolerance: 1e-8,
            position_tolerance: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaxSpec {
    pub spectral: f64,
    /// Propagation distance of the sampled points, in zeta widths.
    pub zeta_widths: f64,
    /// Sample offsets from the soliton centre, in tau widths.
    pub offsets_widths: Vec<f64>,
    /// Stencil sizes as fractions of a width (both axes).
    pub h_fractions: Vec<f64>,
    pub slope_min: f64,
    pub slope_max: f64,
    pub corrupt_scale: f64,
    pub control_ratio_min: f64,
}

impl Default for LaxSpec {
    fn default() -> Self {
        Self {
            spectral: 20.0,
            zeta_widths: 1.0,
            offsets_widths: vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0],
            h_fractions: vec![0.4, 0.2, 0.1, 0.05],
            slope_min: 1.8,
            slope_max: 2.2,
            corrupt_scale: 1.01,
            control_ratio_min: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModesSpec {
    pub tolerance: f64,
    pub half_span_widths: f64,
    pub n_tau: usize,
    pub zeta: f64,
    /// Round-off floor for the "does not increase when r is halved" check.
    pub deviation_floor: f64,
    /// The negative control scales the xi mode by `1 + u`, `u` drawn
    /// uniformly from this range with the config seed.
    pub control_perturbation: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumScale>,
}

impl Default for ModesSpec {
    fn default() -> Self {
        Self {
            tolerance: 1e-2,
            half_span_widths: 20.0,
            n_tau: 8001,
            zeta: 0.0,
            deviation_floor: 1e-10,
            control_perturbation: [0.03, 0.1],
            quantum: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeasibilitySpec {
    pub atomic: AtomicData,
    /// Propagation distance for the loss estimate, m.
    pub distance_m: f64,
    pub loss_budget: f64,
    /// Take g from the atomic data rather than from the medium section.
    pub coupling_from_atomic: bool,
}

impl Default for FeasibilitySpec {
    fn default() -> Self {
        Self {
            atomic: AtomicData {
                einstein_a: 6.15e7,
                density: 1e18,
                wavelength: 5.89e-7,
                cross_section: 1e-6,
            },
            distance_m: 1e-2,
            loss_budget: 0.1,
            coupling_from_atomic: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub soliton: SolitonParams,
    pub background: BackgroundSpec,
    pub detuning: DetuningSpec,
    pub medium: MediumSpec,
    pub grid: GridSpec,
    pub output: OutputSpec,
    pub seed: u64,
    pub figure1: Figure1Spec,
    pub oracle: OracleSpec,
    pub stop_retrieve: StopRetrieveSpec,
    pub lax: LaxSpec,
    pub modes: ModesSpec,
    pub feasibility: FeasibilitySpec,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::Figure1,
            soliton: SolitonParams::figure1(),
            background: BackgroundSpec::default(),
            detuning: DetuningSpec::default(),
            medium: MediumSpec::default(),
            grid: GridSpec::default(),
            output: OutputSpec::default(),
            seed: 0,
            figure1: Figure1Spec::default(),
            oracle: OracleSpec::default(),
            stop_retrieve: StopRetrieveSpec::default(),
            lax: LaxSpec::default(),
            modes: ModesSpec::default(),
            feasibility: FeasibilitySpec::default(),
        }
    }
}

/// Resolved grids for one PDE run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedGrid {
    pub tau_width: f64,
    pub zeta_width: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
    pub zeta_end: f64,
    pub n_zeta: usize,
}

impl ResolvedGrid {
    pub fn dtau(&self) -> f64 {
        (self.tau_max - self.tau_min) / (self.n_tau - 1) as f64
    }
}

impl ScenarioConfig {
    pub fn for_scenario(kind: ScenarioKind) -> Self {
        Self {
            scenario: kind,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses `text` (may be empty for all defaults), applies the overrides
    /// in order and deserializes the result.
    pub fn from_json_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut value: Value = if text.trim().is_empty() {
            serde_json::to_value(Self::default()).map_err(json_err)?
        } else {
            serde_json::from_str(text).map_err(json_err)?
        };
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        serde_json::from_value(value).map_err(json_err)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(self.hash_bytes())
    }

    pub fn hash_bytes(&self) -> [u8; 32] {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).into()
    }

    pub fn nu(&self) -> Result<DetuningDistribution> {
        self.detuning.build()
    }

    /// Launch parameters: the configured soliton, moved back by half the
    /// drift when `grid.center_drift` is set.
    pub fn launch_params(&self) -> SolitonParams {
        if self.grid.center_drift {
            self.soliton.with_q0(self.soliton.q0() - 0.5 * self.grid.zeta_end_widths)
        } else {
            self.soliton
        }
    }

    pub fn resolve_grid(&self) -> Result<ResolvedGrid> {
        let g = &self.grid;
        if g.n_tau < 16 {
            return Err(Error::InvalidParameter(format!("grid.n_tau = {} is below 16", g.n_tau)));
        }
        if g.n_zeta < 1 {
            return Err(Error::InvalidParameter("grid.n_zeta must be >= 1".into()));
        }
        if !(g.tau_half_span_widths > 0.0) {
            return Err(Error::InvalidParameter("grid.tau_half_span_widths must be > 0".into()));
        }
        let intensity = self.background.omega().norm_sqr();
        if !(intensity > 0.0) {
            return Err(Error::InvalidParameter("background amplitude must be > 0".into()));
        }
        let nu = self.nu()?;
        let tau_width = self.soliton.tau_width(intensity);
        let coupling = self.medium.coupling()?;
        let zeta_width = if coupling > 0.0 {
            self.soliton.zeta_width(coupling, &nu)
        } else {
            f64::INFINITY
        };
        let zeta_end = match g.zeta_end {
            Some(z) => z,
            None if zeta_width.is_finite() => g.zeta_end_widths * zeta_width,
            None => {
                return Err(Error::InvalidParameter(
                    "grid.zeta_end must be given explicitly for an empty medium".into(),
                ))
            }
        };
        if !(zeta_end > 0.0) || !zeta_end.is_finite() {
            return Err(Error::InvalidParameter(format!("zeta_end = {zeta_end} must be > 0")));
        }
        let (tau_min, tau_max, n_tau) = match &self.background {
            BackgroundSpec::Sampled { tau0, dtau, re, .. } => (*tau0, tau0 + dtau * (re.len().max(2) - 1) as f64, re.len()),
            BackgroundSpec::Ramp { t_hold, edge, .. } => {
                // The dark interval and the second edge are appended at the
                // same spacing.
                let half = g.tau_half_span_widths * tau_width;
                let dtau = 2.0 * half / (g.n_tau - 1) as f64;
                let extra = ((t_hold + edge) / dtau).ceil() as usize;
                let lo = g.tau_center - half;
                (lo, lo + dtau * (g.n_tau - 1 + extra) as f64, g.n_tau + extra)
            }
            BackgroundSpec::Constant { .. } => {
                let half = g.tau_half_span_widths * tau_width;
                (g.tau_center - half, g.tau_center + half, g.n_tau)
            }
        };
        Ok(ResolvedGrid {
            tau_width,
            zeta_width,
            tau_min,
            tau_max,
            n_tau,
            zeta_end,
            n_zeta: g.n_zeta,
        })
    }

    pub fn build_background(&self, grid: &ResolvedGrid) -> Result<BackgroundField> {
        match &self.background {
            BackgroundSpec::Constant { .. } => {
                BackgroundField::constant(self.background.omega(), grid.tau_min, grid.tau_max, grid.n_tau)
            }
            BackgroundSpec::Ramp { .. } => {
                let ramp = self.background.ramp()?.expect("ramp variant");
                BackgroundField::ramp(self.background.omega(), grid.tau_min, grid.tau_max, grid.n_tau, ramp)
            }
            BackgroundSpec::Sampled { tau0, dtau, re, im } => {
                if re.len() != im.len() {
                    return Err(Error::InvalidParameter("sampled background: re and im lengths differ".into()));
                }
                let samples = re.iter().zip(im).map(|(a, b)| C64::new(*a, *b)).collect();
                BackgroundField::from_samples(*tau0, *dtau, samples)
            }
        }
    }

    /// Checks the configuration before any run: parameters build, grids
    /// resolve, and explicit substeps satisfy the resolution rule.
    pub fn validate(&self) -> Result<()> {
        let nu = self.nu()?;
        self.medium.coupling()?;
        self.background.ramp()?;
        if self.grid.checkpoint_stride == 0 {
            return Err(Error::InvalidParameter("grid.checkpoint_stride must be >= 1".into()));
        }
        let needs_grid = !matches!(self.scenario, ScenarioKind::Feasibility);
        if needs_grid {
            let grid = self.resolve_grid()?;
            if let Some(sub) = self.grid.substeps {
                if sub == 0 {
                    return Err(Error::InvalidParameter("grid.substeps must be >= 1".into()));
                }
                let bg = self.build_background(&grid)?;
                let max_omega = bg.max_intensity().sqrt();
                let product = bg.dtau() / sub as f64 * max_omega.max(nu.max_abs_detuning());
                if product > RESOLUTION_LIMIT {
                    return Err(Error::StepTooLarge {
                        product,
                        limit: RESOLUTION_LIMIT,
                    });
                }
            }
        }
        match self.scenario {
            ScenarioKind::Lax if self.lax.h_fractions.len() < 2 => {
                Err(Error::InvalidParameter("lax.h_fractions needs >= 2 levels".into()))
            }
            ScenarioKind::StopRetrieve if self.stop_retrieve.holds.len() < 2 => {
                Err(Error::InvalidParameter("stop_retrieve.holds needs >= 2 hold times".into()))
            }
            ScenarioKind::StopRetrieve if !(self.stop_retrieve.edge > 0.0) => {
                Err(Error::InvalidParameter("stop_retrieve.edge must be > 0".into()))
            }
            ScenarioKind::Modes if self.modes.n_tau < 16 => {
                Err(Error::InvalidParameter("modes.n_tau must be >= 16".into()))
            }
            ScenarioKind::Feasibility => self.feasibility.atomic.validate(),
            _ => Ok(()),
        }
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Config(e.to_string())
}

/// Applies `a.b.c=value`. The value is parsed as JSON when possible and taken
/// as a string otherwise. Missing intermediate objects are created.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::InvalidParameter(format!("override {assignment:?} is not key=value")))?;
    let path = path.trim();
    if path.is_empty() {
        return Err(Error::InvalidParameter(format!("override {assignment:?} has an empty key")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    for (n, key) in keys.iter().enumerate() {
        let last = n + 1 == keys.len();
        match node {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                node = map
                    .entry(key.to_string())
                    .or_insert_with(|| Value::Object(Default::default()));
            }
            Value::Array(items) => {
                let idx: usize = key
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("override {path}: {key:?} is not an index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| Error::InvalidParameter(format!("override {path}: index {idx} >= {len}")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                node = slot;
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "override {path}: {key:?} is below a non-object value"
                )))
            }
        }
    }
    unreachable!("loop returns on the last key")
}
