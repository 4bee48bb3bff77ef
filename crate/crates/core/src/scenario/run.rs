//! Scenario runners. Each returns its checks, a JSON summary and in-memory
//! artifacts; nothing touches the file system here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::amplitudes::{FieldPair, C64};
use crate::analytic::{
    fractional_loss, launch_pulse, min_length_for_loss, peak_excited_population, soliton_length_us,
    soliton_velocity, stokes_of, BackgroundField, SolitonSolution,
};
use crate::detuning::LineShape;
use crate::dynamics::checkpoint::{write_binary, write_fields_csv, Checkpoint};
use crate::dynamics::{analyze_history, propagate, track_soliton, DynamicsReport, InitialAtoms, MarchSpec, Propagation};
use crate::error::{Error, Result};
use crate::lax::{write_refinement_csv, zero_curvature_residual, AnalyticHistory};
use crate::medium::{coupling_from_atomic_data, MediumProfile};
use crate::modes::{
    all_modes, bracket_matrix, symplectic_check_and_rescale, write_bracket_csv, write_modes_csv, FluctuationMode,
    ModeReport,
};
use crate::regime::validate_regime;
use crate::scenario::config::{BackgroundSpec, MediumSpec, OutputFormat, ResolvedGrid, ScenarioConfig, ScenarioKind};
use crate::scenario::report::{provenance, to_json_bytes, Artifact, Bound, Check, Report, ScenarioOutput, REPORT_SCHEMA, VERSION};
use crate::units::{us_to_meters, SPEED_OF_LIGHT};

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    provenance: String,
    checks: Vec<Check>,
    warnings: Vec<String>,
    artifacts: Vec<Artifact>,
    summary: Map<String, Value>,
}

impl Ctx<'_> {
    fn check(&mut self, name: impl Into<String>, value: f64, bound: Bound) {
        self.checks.push(Check::new(name, value, bound));
    }

    fn note(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }

    fn csv(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>, &str) -> std::io::Result<()>) {
        let mut bytes = Vec::new();
        write(&mut bytes, &self.provenance).expect("writing to memory");
        self.artifacts.push(Artifact::new(name, bytes));
    }

    fn json(&mut self, name: &str, value: &Value) {
        let mut doc = Map::new();
        doc.insert("provenance".into(), Value::String(self.provenance.clone()));
        doc.insert("data".into(), value.clone());
        self.artifacts.push(Artifact::new(name, to_json_bytes(&Value::Object(doc))));
    }

    fn history(&mut self, name: &str, prop: &Propagation) -> Result<()> {
        let atoms = if self.cfg.output.include_atoms {
            prop.atoms.clone()
        } else {
            let mut a = prop.atoms.clone();
            a.values.clear();
            a.zeta.clear();
            a
        };
        let cp = Checkpoint {
            fields: prop.fields.clone(),
            atoms,
            last_step: prop.last_step,
            config_hash: self.cfg.hash_bytes(),
        };
        let mut bytes = Vec::new();
        write_binary(&mut bytes, &cp, self.cfg.output.precision).map_err(|e| Error::Checkpoint(e.to_string()))?;
        self.artifacts.push(Artifact::new(name, bytes));
        Ok(())
    }
}

/// Validates `cfg` and runs its scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    cfg.validate()?;
    let hash = cfg.hash();
    let mut ctx = Ctx {
        cfg,
        provenance: provenance(cfg.scenario, &hash),
        checks: Vec::new(),
        warnings: Vec::new(),
        artifacts: Vec::new(),
        summary: Map::new(),
    };
    match cfg.scenario {
        ScenarioKind::Figure1 => figure1(&mut ctx)?,
        ScenarioKind::Oracle => oracle(&mut ctx)?,
        ScenarioKind::StopRetrieve => stop_retrieve(&mut ctx)?,
        ScenarioKind::Lax => lax(&mut ctx)?,
        ScenarioKind::Modes => modes(&mut ctx)?,
        ScenarioKind::Feasibility => feasibility(&mut ctx)?,
    }
    let report = Report {
        schema: REPORT_SCHEMA,
        scenario: cfg.scenario,
        version: VERSION.to_string(),
        config_sha256: hash,
        pass: ctx.checks.iter().all(|c| c.pass),
        checks: ctx.checks,
        warnings: ctx.warnings,
        summary: Value::Object(ctx.summary),
        artifacts: ctx.artifacts.iter().map(|a| a.name.clone()).collect(),
    };
    Ok(ScenarioOutput {
        report,
        artifacts: ctx.artifacts,
    })
}

/// As [`run_scenario`], inside a rayon pool of `threads` workers.
pub fn run_with_threads(cfg: &ScenarioConfig, threads: Option<usize>) -> Result<ScenarioOutput> {
    match threads {
        None => run_scenario(cfg),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(|| run_scenario(cfg)),
    }
}

fn with_omega(cfg: &ScenarioConfig, omega: f64) -> Option<ScenarioConfig> {
    let BackgroundSpec::Constant { phase, .. } = cfg.background else {
        return None;
    };
    let mut c = cfg.clone();
    c.background = BackgroundSpec::Constant { omega, phase };
    Some(c)
}

fn with_coupling(cfg: &ScenarioConfig, coupling: f64) -> Option<ScenarioConfig> {
    let MediumSpec::Uniform { length, .. } = cfg.medium else {
        return None;
    };
    let mut c = cfg.clone();
    c.medium = MediumSpec::Uniform { coupling, length };
    Some(c)
}

// ---------------------------------------------------------------- figure1

fn figure1(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let f1 = &cfg.figure1;
    let nu = cfg.nu()?;
    let omega = cfg.background.omega();
    let intensity = omega.norm_sqr();
    let params = cfg.soliton;
    let width = params.tau_width(intensity);
    let half = f1.half_span_widths * width;
    let centre = cfg.grid.tau_center;
    let bg = match &cfg.background {
        BackgroundSpec::Constant { .. } => BackgroundField::constant(omega, centre - half, centre + half, cfg.grid.n_tau)?,
        _ => {
            let grid = cfg.resolve_grid()?;
            cfg.build_background(&grid)?
        }
    };
    let medium = cfg.medium.build(f1.zeta.max(1.0))?;
    let sol = SolitonSolution::new(params, &bg, &medium, &nu);
    let zeta = f1.zeta;
    let fields = sol.field_slice(zeta);

    let mut intensity_dev: f64 = 0.0;
    let mut stokes_dev: f64 = 0.0;
    let mut rows = Vec::with_capacity(fields.len());
    for (i, f) in fields.iter().enumerate() {
        let local = bg.samples()[i].norm_sqr();
        if local > 0.0 {
            intensity_dev = intensity_dev.max((f.intensity() - local).abs() / local);
        }
        let s = stokes_of(f);
        if s.s0 > 0.0 {
            stokes_dev = stokes_dev.max(s.polarization_defect());
        }
        rows.push((bg.tau(i), *f, s));
    }

    // Both edges against the circular asymptote (1, 0, 0, 1).
    let edge_dev = |f: &FieldPair| {
        let s = stokes_of(f);
        ((s.s1 / s.s0).powi(2) + (s.s2 / s.s0).powi(2) + (s.s3 / s.s0 - 1.0).powi(2)).sqrt()
    };
    let n = fields.len();
    let left = edge_dev(&fields[0]);
    let right = edge_dev(&fields[n - 1]);

    // arg phi_+ far behind the soliton minus far ahead of it.
    let phi_plus = |i: usize| fields[i].p / bg.samples()[i];
    let phase = (phi_plus(0) / phi_plus(n - 1)).arg();
    let expected = wrap_phase(-2.0 * params.theta());
    let phase_err = (wrap_phase(phase - expected)).abs();

    ctx.check("intensity_identity_rel", intensity_dev, Bound::AtMost(f1.intensity_tolerance));
    ctx.check("stokes_magnitude_defect", stokes_dev, Bound::AtMost(f1.stokes_tolerance));
    ctx.check("geometric_phase_error_rad", phase_err, Bound::AtMost(f1.phase_tolerance));
    ctx.check("stokes_edge_tau_min", left, Bound::AtMost(f1.edge_tolerance));
    ctx.check("stokes_edge_tau_max", right, Bound::AtMost(f1.edge_tolerance));

    let coupling = cfg.medium.coupling()?;
    let regime = validate_regime(&params, &bg, coupling, &nu);
    ctx.warnings.extend(regime.warnings.iter().cloned());
    let center = sol.center_tau(zeta);
    ctx.note("rows", json!(n));
    ctx.note("tau_width_us", json!(width));
    ctx.note("geometric_phase_rad", json!(phase));
    ctx.note("expected_phase_rad", json!(expected));
    ctx.note("tau_center_us", json!(center));
    if coupling > 0.0 {
        let v = soliton_velocity(&params, coupling, &nu, intensity)?;
        let ls = soliton_length_us(&params, intensity, v);
        ctx.note("v_over_c", json!(v));
        ctx.note("soliton_length_us", json!(ls));
        ctx.note("soliton_length_m", json!(us_to_meters(ls)));
    }
    // At fixed zeta the strip is the spatial profile at t = 0 with
    // x / l_s = -(tau - tau_center) / W.
    ctx.note("spatial_axis", json!("x_over_ls = -(tau_us - tau_center_us) / tau_width_us"));
    ctx.note("regime", serde_json::to_value(&regime)?);

    if cfg.output.format == OutputFormat::Bin {
        ctx.warnings.push("figure1 has no history; strip written as CSV".into());
    }
    match cfg.output.format {
        OutputFormat::Json => {
            let data: Vec<Value> = rows
                .iter()
                .map(|(t, f, s)| {
                    json!({
                        "tau_us": t, "zeta_us": zeta,
                        "re_omega_p": f.p.re, "im_omega_p": f.p.im,
                        "re_omega_m": f.m.re, "im_omega_m": f.m.im,
                        "s0": s.s0, "s1": s.s1, "s2": s.s2, "s3": s.s3,
                    })
                })
                .collect();
            ctx.json("figure1_strip.json", &Value::Array(data));
        }
        OutputFormat::Csv | OutputFormat::Bin => ctx.csv("figure1_strip.csv", |w, prov| {
            use std::io::Write;
            writeln!(w, "# {prov}")?;
            writeln!(w, "{}", FIGURE1_HEADER)?;
            for (t, f, s) in &rows {
                writeln!(
                    w,
                    "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                    t, zeta, f.p.re, f.p.im, f.m.re, f.m.im, s.s0, s.s1, s.s2, s.s3
                )?;
            }
            Ok(())
        }),
    }
    Ok(())
}

pub const FIGURE1_HEADER: &str = "tau_us,zeta_us,re_omega_p,im_omega_p,re_omega_m,im_omega_m,s0,s1,s2,s3";

fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let y = x.rem_euclid(two_pi);
    if y > std::f64::consts::PI {
        y - two_pi
    } else {
        y
    }
}

// ---------------------------------------------------------------- oracle

/// One propagated history compared against the closed form.
pub struct PdeRun {
    pub label: String,
    pub omega: f64,
    pub coupling: f64,
    pub grid: ResolvedGrid,
    pub propagation: Propagation,
    /// `max_tau |Omega_PDE - Omega_exact| / |Omega|` on the last slice.
    pub max_error: f64,
    pub report: DynamicsReport,
    pub predicted_v_over_c: f64,
}

impl PdeRun {
    pub fn intensity_ratio(&self, cfg: &ScenarioConfig) -> f64 {
        self.omega * self.omega / cfg.soliton.modulus_sqr()
    }
}

/// Launches the configured soliton, marches it to `zeta_end` and compares
/// the last slice with the closed form.
pub fn run_pde(cfg: &ScenarioConfig, label: &str, store_atoms: bool) -> Result<PdeRun> {
    let grid = cfg.resolve_grid()?;
    let nu = cfg.nu()?;
    let medium = cfg.medium.build(grid.zeta_end)?;
    let bg = cfg.build_background(&grid)?;
    let params = cfg.launch_params();
    let launch = launch_pulse(&params, &bg);
    let mut spec = MarchSpec::new(grid.n_zeta, grid.zeta_end).with_stride(cfg.grid.checkpoint_stride);
    if let Some(s) = cfg.grid.substeps {
        spec = spec.with_substeps(s);
    }
    if !store_atoms {
        spec = spec.without_atoms();
    }
    let prop = propagate(&launch, &medium, &nu, InitialAtoms::DarkOfField, &spec)?;
    let sol = SolitonSolution::new(params, &bg, &medium, &nu);
    let zl = *prop.fields.zeta.last().expect("at least one slice");
    let exact = sol.field_slice(zl);
    let omega = bg.max_intensity().sqrt();
    let max_error = prop
        .fields
        .last_slice()
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a.p - b.p).norm().max((a.m - b.m).norm()))
        .fold(0.0, f64::max)
        / omega;
    let report = analyze_history(&prop.fields, &prop.atoms, &nu, &medium)?;
    let coupling = cfg.medium.coupling()?;
    let predicted = if coupling > 0.0 {
        soliton_velocity(&params, coupling, &nu, omega * omega)?
    } else {
        f64::INFINITY
    };
    Ok(PdeRun {
        label: label.to_string(),
        omega,
        coupling,
        grid,
        propagation: prop,
        max_error,
        report,
        predicted_v_over_c: predicted,
    })
}

fn refined(cfg: &ScenarioConfig) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.grid.n_tau = 2 * (cfg.grid.n_tau - 1) + 1;
    c.grid.n_zeta = 2 * cfg.grid.n_zeta;
    c
}

fn oracle(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let o = &cfg.oracle;
    let base = run_pde(cfg, "base", true)?;
    let mut table: Vec<(String, f64, f64, f64, usize, usize, f64, f64, f64, Option<f64>, Option<f64>)> = Vec::new();
    let mut push = |run: &PdeRun, cfg: &ScenarioConfig| {
        table.push((
            run.label.clone(),
            run.omega,
            run.coupling,
            run.intensity_ratio(cfg),
            run.grid.n_tau,
            run.grid.n_zeta,
            run.grid.dtau(),
            run.grid.zeta_end / run.grid.n_zeta as f64,
            run.max_error,
            run.report.conservation.as_ref().map(|c| c.relative),
            run.report.v_over_c,
        ));
    };
    push(&base, cfg);
    ctx.note("base_max_error", json!(base.max_error));
    ctx.note("base_substeps", json!(base.propagation.substeps));
    ctx.note("max_norm_drift", json!(base.report.max_norm_drift));
    ctx.note("max_excited_population", json!(base.report.max_excited_population));

    // velocity law
    if !o.velocity_cases.is_empty() {
        let mut ks = Vec::new();
        for &[om, g] in &o.velocity_cases {
            let same = (om - base.omega).abs() < 1e-12 && (g - base.coupling).abs() < 1e-12;
            let (measured, predicted) = if same {
                (base.report.v_over_c, base.predicted_v_over_c)
            } else {
                let Some(c) = with_omega(cfg, om).and_then(|c| with_coupling(&c, g)) else {
                    ctx.warnings
                        .push("velocity cases need a constant background and a uniform medium; skipped".into());
                    break;
                };
                let run = run_pde(&c, &format!("velocity_{om}_{g}"), false)?;
                push(&run, &c);
                (run.report.v_over_c, run.predicted_v_over_c)
            };
            let measured = measured.unwrap_or(f64::NAN);
            let rel = (measured - predicted).abs() / predicted;
            ctx.check(format!("velocity_rel_error[omega={om},g={g}]"), rel, Bound::AtMost(o.velocity_tolerance));
            ks.push(measured * 2.0 * g / (om * om));
        }
        if ks.len() >= 2 {
            let mean = ks.iter().sum::<f64>() / ks.len() as f64;
            let spread = ks.iter().fold(0.0, |m: f64, k| m.max((k - mean).abs())) / mean;
            ctx.check("velocity_linearity_spread", spread, Bound::AtMost(o.velocity_tolerance));
        }
    }

    // error against the intensity ratio, same absolute grids
    if o.r_test {
        match with_omega(cfg, base.omega * std::f64::consts::SQRT_2) {
            Some(mut c) => {
                c.grid.tau_half_span_widths *= 2.0;
                let run = run_pde(&c, "r_doubled", false)?;
                push(&run, &c);
                ctx.check("error_ratio_r_halved", run.max_error / base.max_error, Bound::AtLeast(o.r_ratio_min));
            }
            None => ctx.warnings.push("r test needs a constant background; skipped".into()),
        }
    }

    // error against the grid, fixed r
    if o.h_test {
        match with_omega(cfg, base.omega * o.h_intensity_scale.sqrt()) {
            Some(c) => {
                let coarse = run_pde(&c, "h_coarse", false)?;
                push(&coarse, &c);
                let fc = refined(&c);
                let fine = run_pde(&fc, "h_fine", false)?;
                push(&fine, &fc);
                ctx.check("error_ratio_h_halved", coarse.max_error / fine.max_error, Bound::AtLeast(o.h_ratio_min));
            }
            None => ctx.warnings.push("h test needs a constant background; skipped".into()),
        }
    }

    // conservation law
    if let Some(c) = &base.report.conservation {
        ctx.check("conservation_relative_residual", c.relative, Bound::AtMost(o.conservation_tolerance));
        ctx.note("conservation", serde_json::to_value(c)?);
        if o.conservation_refinement {
            let fc = refined(cfg);
            let fine = run_pde(&fc, "conservation_fine", true)?;
            push(&fine, &fc);
            if let Some(cf) = &fine.report.conservation {
                ctx.check("conservation_refinement_ratio", c.relative / cf.relative, Bound::AtLeast(o.conservation_ratio_min));
                ctx.note("conservation_fine", serde_json::to_value(cf)?);
            }
        }
    }

    match cfg.output.format {
        OutputFormat::Json => {
            let rows: Vec<Value> = table
                .iter()
                .map(|r| {
                    json!({
                        "label": r.0, "omega_mhz": r.1, "coupling_mhz2": r.2, "r": r.3,
                        "n_tau": r.4, "n_zeta": r.5, "dtau_us": r.6, "dzeta_us": r.7,
                        "max_error": r.8, "conservation_relative": r.9, "v_over_c": r.10,
                    })
                })
                .collect();
            ctx.json("oracle_errors.json", &Value::Array(rows));
        }
        fmt => {
            ctx.csv("oracle_errors.csv", |w, prov| {
                use std::io::Write;
                writeln!(w, "# {prov}")?;
                writeln!(w, "{ORACLE_HEADER}")?;
                let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
                for r in &table {
                    writeln!(
                        w,
                        "{},{:e},{:e},{:e},{},{},{:e},{:e},{:e},{},{}",
                        r.0, r.1, r.2, r.3, r.4, r.5, r.6, r.7, r.8, opt(r.9), opt(r.10)
                    )?;
                }
                Ok(())
            });
            if fmt == OutputFormat::Bin {
                ctx.history("oracle_history.bin", &base.propagation)?;
            }
        }
    }
    Ok(())
}

pub const ORACLE_HEADER: &str =
    "label,omega_mhz,coupling_mhz2,r,n_tau,n_zeta,dtau_us,dzeta_us,max_error,conservation_relative,v_over_c";

// ---------------------------------------------------------------- stop-retrieve

/// One stop-and-retrieve run.
#[derive(Debug, Clone)]
pub struct HoldRun {
    pub hold: f64,
    /// Max change of `psi_±` and `psi_+ conj(psi_-)` inside the dark interval.
    pub frozen_drift: f64,
    pub excited_at_dark_start: f64,
    pub max_field_in_dark: f64,
    pub tau_center_start: f64,
    pub tau_center_end: f64,
    /// Accumulated intensity between the two centres, MHz^2 us.
    pub accumulated: f64,
    pub predicted: f64,
    pub track: Vec<(f64, f64, f64)>,
}

pub fn run_hold(cfg: &ScenarioConfig, hold: f64) -> Result<(HoldRun, Propagation)> {
    let sr = &cfg.stop_retrieve;
    let mut c = cfg.clone();
    let omega = cfg.background.omega();
    c.background = BackgroundSpec::Ramp {
        omega: omega.norm(),
        phase: omega.arg(),
        t_off: sr.dark_start - sr.edge,
        t_hold: hold,
        edge: sr.edge,
        t_on: None,
    };
    let ramp = c.background.ramp()?.expect("ramp");
    let grid = c.resolve_grid()?;
    let nu = c.nu()?;
    let medium = c.medium.build(grid.zeta_end)?;
    let bg = c.build_background(&grid)?;
    let params = c.launch_params();
    let launch = launch_pulse(&params, &bg);
    let mut spec = MarchSpec::new(grid.n_zeta, grid.zeta_end);
    if let Some(s) = c.grid.substeps {
        spec = spec.with_substeps(s);
    }
    let prop = propagate(&launch, &medium, &nu, InitialAtoms::DarkOfField, &spec)?;
    let f = &prop.fields;

    let mut frozen: f64 = 0.0;
    let mut excited: f64 = 0.0;
    let mut dark_field: f64 = 0.0;
    if hold > 0.0 {
        let i0 = ((ramp.dark_start() - f.tau0) / f.dtau).ceil() as usize;
        let i1 = (((ramp.dark_end() - f.tau0) / f.dtau).floor() as usize).min(f.n_tau - 1);
        for j in 0..f.n_zeta() {
            let start = prop.atoms.at(i0, j);
            for a in start {
                excited = excited.max(a.e.norm());
            }
            for i in i0..=i1 {
                dark_field = dark_field.max(f.at(i, j).magnitude());
                for (a, a0) in prop.atoms.at(i, j).iter().zip(start) {
                    let coherence = a.p * a.m.conj() - a0.p * a0.m.conj();
                    frozen = frozen.max((a.p - a0.p).norm()).max((a.m - a0.m).norm()).max(coherence.norm());
                }
            }
        }
    }
    let tr = track_soliton(f)?;
    let t0 = tr.tau_center[0];
    let t1 = *tr.tau_center.last().expect("non-empty track");
    let accumulated = bg.cumulative_intensity(t1) - bg.cumulative_intensity(t0);
    let dg = medium.integrated_coupling(*f.zeta.last().expect("slices")) - medium.integrated_coupling(f.zeta[0]);
    let predicted = 4.0 * params.modulus_sqr() * params.q_rate(&nu) * dg / params.eta();
    let track = tr
        .zeta
        .iter()
        .zip(&tr.tau_center)
        .map(|(z, t)| (*z, *t, bg.cumulative_intensity(*t)))
        .collect();
    Ok((
        HoldRun {
            hold,
            frozen_drift: frozen,
            excited_at_dark_start: excited,
            max_field_in_dark: dark_field,
            tau_center_start: t0,
            tau_center_end: t1,
            accumulated,
            predicted,
            track,
        },
        prop,
    ))
}

fn stop_retrieve(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let sr = &cfg.stop_retrieve;
    let mut runs = Vec::new();
    let mut first_prop = None;
    for &hold in &sr.holds {
        let (run, prop) = run_hold(cfg, hold)?;
        if first_prop.is_none() {
            first_prop = Some(prop);
        }
        runs.push(run);
    }
    let frozen = runs.iter().filter(|r| r.hold > 0.0).fold(0.0, |m: f64, r| m.max(r.frozen_drift));
    ctx.check("frozen_ground_drift", frozen, Bound::AtMost(sr.frozen_tolerance));
    let prediction_err = runs
        .iter()
        .fold(0.0, |m: f64, r| m.max((r.accumulated - r.predicted).abs() / r.predicted.abs()));
    ctx.check("retrieval_vs_accumulated_intensity", prediction_err, Bound::AtMost(sr.position_tolerance));
    let mut spread: f64 = 0.0;
    for a in &runs {
        for b in &runs {
            spread = spread.max((a.accumulated - b.accumulated).abs() / a.accumulated.abs());
        }
    }
    ctx.check("hold_time_independence", spread, Bound::AtMost(sr.position_tolerance));

    let per_hold: Vec<Value> = runs
        .iter()
        .map(|r| {
            json!({
                "hold_us": r.hold,
                "frozen_drift": r.frozen_drift,
                "excited_amplitude_at_dark_start": r.excited_at_dark_start,
                "max_field_in_dark": r.max_field_in_dark,
                "tau_center_start_us": r.tau_center_start,
                "tau_center_end_us": r.tau_center_end,
                "accumulated_intensity": r.accumulated,
                "predicted_accumulated_intensity": r.predicted,
            })
        })
        .collect();
    ctx.note("holds", Value::Array(per_hold));
    ctx.note("edge_us", json!(sr.edge));
    ctx.note("dark_start_us", json!(sr.dark_start));

    match cfg.output.format {
        OutputFormat::Json => {
            let data: Vec<Value> = runs
                .iter()
                .flat_map(|r| {
                    r.track.iter().map(move |(z, t, i)| {
                        json!({"hold_us": r.hold, "zeta_us": z, "tau_center_us": t, "cumulative_intensity": i})
                    })
                })
                .collect();
            ctx.json("stop_retrieve_track.json", &Value::Array(data));
        }
        fmt => {
            ctx.csv("stop_retrieve_track.csv", |w, prov| {
                use std::io::Write;
                writeln!(w, "# {prov}")?;
                writeln!(w, "hold_us,zeta_us,tau_center_us,cumulative_intensity")?;
                for r in &runs {
                    for (z, t, i) in &r.track {
                        writeln!(w, "{:e},{:e},{:e},{:e}", r.hold, z, t, i)?;
                    }
                }
                Ok(())
            });
            if fmt == OutputFormat::Bin {
                if let Some(p) = &first_prop {
                    ctx.history("stop_retrieve_history.bin", p)?;
                }
            } else if let Some(p) = &first_prop {
                let fields = p.fields.clone();
                ctx.csv("stop_retrieve_fields.csv", |w, prov| {
                    // Last slice only; the full history goes to the binary format.
                    let mut last = fields.clone();
                    let n = last.n_zeta();
                    last.values = fields.slice(n - 1).to_vec();
                    last.zeta = vec![fields.zeta[n - 1]];
                    write_fields_csv(w, &last, prov)
                });
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- lax

fn lax(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let lx = &cfg.lax;
    let grid = cfg.resolve_grid()?;
    if !grid.zeta_width.is_finite() {
        return Err(Error::InvalidParameter("lax scenario needs a medium with g > 0".into()));
    }
    let nu = cfg.nu()?;
    let zeta = lx.zeta_widths * grid.zeta_width;
    let hmax = lx.h_fractions.iter().fold(0.0, |m: f64, h| m.max(*h));
    let medium = cfg.medium.build(grid.zeta_end.max(zeta + 2.0 * hmax * grid.zeta_width))?;
    let bg = cfg.build_background(&grid)?;
    let sol = SolitonSolution::new(cfg.soliton, &bg, &medium, &nu);
    let tc = sol
        .center_tau(zeta)
        .ok_or_else(|| Error::GridTooShort(format!("soliton centre at zeta = {zeta} is outside the tau grid")))?;
    let points: Vec<(f64, f64)> = lx.offsets_widths.iter().map(|k| (tc + k * grid.tau_width, zeta)).collect();
    let clean = AnalyticHistory::new(sol.clone(), &medium);
    let bad = AnalyticHistory::new(sol.clone(), &medium).corrupted(lx.corrupt_scale);
    let mut reports = Vec::new();
    let mut controls = Vec::new();
    for &f in &lx.h_fractions {
        let (ht, hz) = (f * grid.tau_width, f * grid.zeta_width);
        reports.push(zero_curvature_residual(&clean, lx.spectral, &points, ht, hz)?);
        controls.push(zero_curvature_residual(&bad, lx.spectral, &points, ht, hz)?);
    }
    let lh: Vec<f64> = reports.iter().map(|r| r.h_tau.ln()).collect();
    let lr: Vec<f64> = reports.iter().map(|r| r.max_residual.ln()).collect();
    let slope = crate::dynamics::analysis::fit_slope(&lh, &lr).unwrap_or(f64::NAN);
    let finest = reports
        .iter()
        .zip(&controls)
        .min_by(|a, b| a.0.h_tau.total_cmp(&b.0.h_tau))
        .expect(">= 2 levels");
    let ratio = finest.1.max_residual / finest.0.max_residual;
    ctx.check("zero_curvature_loglog_slope", slope, Bound::Between(lx.slope_min, lx.slope_max));
    ctx.check("corrupted_control_ratio", ratio, Bound::AtLeast(lx.control_ratio_min));
    let trace = reports
        .iter()
        .flat_map(|r| r.points.iter())
        .fold(0.0, |m: f64, p| m.max(p.commutator_trace));
    ctx.note("max_commutator_trace", json!(trace));
    ctx.note("tau_center_us", json!(tc));
    ctx.note("zeta_us", json!(zeta));
    ctx.note(
        "levels",
        Value::Array(
            reports
                .iter()
                .zip(&controls)
                .map(|(r, c)| json!({"h_tau": r.h_tau, "h_zeta": r.h_zeta, "max_residual": r.max_residual, "corrupted_max_residual": c.max_residual}))
                .collect(),
        ),
    );
    match cfg.output.format {
        OutputFormat::Json => {
            let data = serde_json::to_value(&reports)?;
            ctx.json("lax_refinement.json", &data);
        }
        _ => {
            ctx.csv("lax_refinement.csv", |w, prov| write_refinement_csv(w, &reports, prov));
            ctx.csv("lax_refinement_corrupted.csv", |w, prov| write_refinement_csv(w, &controls, prov));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- modes

fn mode_set(cfg: &ScenarioConfig, omega: C64, medium: &MediumProfile) -> Result<(Vec<FluctuationMode>, ModeReport)> {
    let m = &cfg.modes;
    let nu = cfg.nu()?;
    let w = cfg.soliton.tau_width(omega.norm_sqr());
    let half = m.half_span_widths * w;
    let c = cfg.grid.tau_center;
    let bg = BackgroundField::constant(omega, c - half, c + half, m.n_tau)?;
    let modes = all_modes(&cfg.soliton, &bg, medium, &nu, m.zeta)?;
    let matrix = bracket_matrix(&modes)?;
    let report = symplectic_check_and_rescale(&matrix, &cfg.soliton, m.quantum.as_ref(), m.tolerance);
    Ok((modes, report))
}

fn modes(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let m = &cfg.modes;
    let omega = cfg.background.omega();
    let grid_zeta = (m.zeta * 2.0).max(1.0);
    let medium = cfg.medium.build(grid_zeta)?;
    let (modes, report) = mode_set(cfg, omega, &medium)?;
    let (_, half) = mode_set(cfg, omega / std::f64::consts::SQRT_2, &medium)?;
    ctx.check("bracket_max_deviation", report.max_deviation, Bound::AtMost(m.tolerance));
    ctx.check(
        "deviation_increase_when_r_halved",
        half.max_deviation - report.max_deviation.max(m.deviation_floor),
        Bound::AtMost(0.0),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let u = rng.gen_range(m.control_perturbation[0]..m.control_perturbation[1]);
    let mut perturbed = modes.clone();
    let xi = &mut perturbed[0];
    for z in xi.d_plus.iter_mut().chain(xi.d_minus.iter_mut()) {
        *z *= 1.0 + u;
    }
    let control = symplectic_check_and_rescale(&bracket_matrix(&perturbed)?, &cfg.soliton, None, m.tolerance);
    ctx.check("negative_control_deviation", control.max_deviation, Bound::AtLeast(m.tolerance));

    ctx.note("intensity_ratio", json!(omega.norm_sqr() / cfg.soliton.modulus_sqr()));
    ctx.note("deviation", json!(report.max_deviation));
    ctx.note("deviation_r_halved", json!(half.max_deviation));
    ctx.note("control_perturbation", json!(u));
    ctx.note("control_failures", json!(control.failures));
    ctx.note(
        "edge_ratios",
        Value::Array(modes.iter().map(|md| json!({"mode": md.param.name(), "edge_ratio": md.edge_ratio()})).collect()),
    );
    ctx.artifacts.push(Artifact::new("mode_report.json", to_json_bytes(&report)));
    match cfg.output.format {
        OutputFormat::Json => {
            ctx.json("bracket.json", &serde_json::to_value(report.matrix)?);
            let data: Vec<Value> = modes
                .iter()
                .map(|md| {
                    json!({
                        "mode": md.param.name(), "tau0_us": md.tau0, "dtau_us": md.dtau,
                        "re_d_p": md.d_plus.iter().map(|z| z.re).collect::<Vec<_>>(),
                        "im_d_p": md.d_plus.iter().map(|z| z.im).collect::<Vec<_>>(),
                        "re_d_m": md.d_minus.iter().map(|z| z.re).collect::<Vec<_>>(),
                        "im_d_m": md.d_minus.iter().map(|z| z.im).collect::<Vec<_>>(),
                    })
                })
                .collect();
            ctx.json("modes.json", &Value::Array(data));
        }
        _ => {
            let matrix = report.matrix;
            ctx.csv("bracket.csv", |w, prov| write_bracket_csv(w, &matrix, prov));
            ctx.csv("modes.csv", |w, prov| write_modes_csv(w, &modes, prov));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- feasibility

fn feasibility(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let fs = &cfg.feasibility;
    let nu = cfg.nu()?;
    let data = fs.atomic;
    let coupling = if fs.coupling_from_atomic {
        coupling_from_atomic_data(&data)?
    } else {
        cfg.medium.coupling()?
    };
    let params = cfg.soliton;
    let intensity = cfg.background.omega().norm_sqr();
    let v = soliton_velocity(&params, coupling, &nu, intensity)?;
    let ls_us = soliton_length_us(&params, intensity, v);
    let ls = us_to_meters(ls_us);
    let loss = fractional_loss(data.density, data.wavelength, fs.distance_m, ls);
    let pop = peak_excited_population(coupling, ls_us, v);
    let min_len = min_length_for_loss(data.density, data.wavelength, fs.distance_m, fs.loss_budget);

    // Independent arithmetic for the same quantities.
    let g_si = 3.0 * SPEED_OF_LIGHT * data.einstein_a * data.density * data.wavelength * data.wavelength
        / (16.0 * std::f64::consts::PI);
    let g_oracle = g_si * 1e-12;
    if fs.coupling_from_atomic {
        ctx.check("coupling_formula_rel_error", ((coupling - g_oracle) / g_oracle).abs(), Bound::AtMost(1e-9));
    }
    if matches!(nu.shape(), LineShape::SharpLine) {
        let ls_closed = 2.0 * params.modulus_sqr() / (params.eta() * coupling);
        ctx.check("length_formula_rel_error", ((ls_us - ls_closed) / ls_closed).abs(), Bound::AtMost(1e-9));
    }
    let l_lambda = fs.distance_m * data.wavelength;
    let loss_oracle = 32.0 * std::f64::consts::PI / (data.density * data.wavelength.powi(3)) * l_lambda / (ls * ls);
    ctx.check("loss_formula_rel_error", ((loss - loss_oracle) / loss_oracle).abs(), Bound::AtMost(1e-9));
    let doubled = fractional_loss(data.density, data.wavelength, fs.distance_m, 2.0 * ls);
    ctx.check("loss_inverse_square_defect", (loss / doubled - 4.0).abs(), Bound::AtMost(1e-12));
    let at_min = fractional_loss(data.density, data.wavelength, fs.distance_m, min_len);
    ctx.check("loss_budget_inversion_rel_error", ((at_min - fs.loss_budget) / fs.loss_budget).abs(), Bound::AtMost(1e-9));

    if ls < min_len {
        ctx.warnings.push(format!(
            "soliton length {ls:.3e} m is below {min_len:.3e} m, the shortest length with loss <= {} over {} m",
            fs.loss_budget, fs.distance_m
        ));
    }
    let bg = BackgroundField::constant(cfg.background.omega(), -1.0, 1.0, 2)?;
    let regime = validate_regime(&params, &bg, coupling, &nu);
    ctx.warnings.extend(regime.warnings.iter().cloned());

    let rows: Vec<(&str, f64, &str)> = vec![
        ("coupling", coupling, "MHz^2"),
        ("v_over_c", v, "1"),
        ("soliton_length", ls, "m"),
        ("soliton_length_time", ls_us, "us"),
        ("fractional_loss", loss, "1"),
        ("peak_excited_population", pop, "1"),
        ("min_length_for_budget", min_len, "m"),
        ("n_lambda3", data.density * data.wavelength.powi(3), "1"),
        ("intensity_ratio", regime.intensity_ratio, "1"),
    ];
    for (k, v, _) in &rows {
        ctx.note(k, json!(v));
    }
    ctx.note("regime", serde_json::to_value(&regime)?);
    match cfg.output.format {
        OutputFormat::Csv => ctx.csv("feasibility.csv", |w, prov| {
            use std::io::Write;
            writeln!(w, "# {prov}")?;
            writeln!(w, "quantity,value,unit")?;
            for (k, v, u) in &rows {
                writeln!(w, "{k},{v:e},{u}")?;
            }
            Ok(())
        }),
        _ => {
            let obj: Map<String, Value> = rows.iter().map(|(k, v, u)| (k.to_string(), json!({"value": v, "unit": u}))).collect();
            ctx.json("feasibility.json", &Value::Object(obj));
        }
    }
    Ok(())
}
