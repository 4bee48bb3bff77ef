//! Field march in retarded coordinates.
//!
//! With `tau = t - z/c` and `zeta = z/c` the field equation becomes
//! `dOmega_±/dzeta = S_±` with the polarization source
//! `S_± = i g sum_k w_k psi_e(Delta_k) conj(psi_±(Delta_k))`. Each zeta slice
//! integrates every detuning class over the full tau grid (RK4, field linear
//! within a cell) starting from the dark state at `tau_min`; zeta advances
//! with a Heun predictor-corrector.
//!
//! Two placements of the corrector are available. `Scheme::Causal` (the
//! default) predicts and corrects each `tau` sample inside the sweep, so the
//! corrected field of earlier samples drives the atoms at later ones.
//! `Scheme::Slice` predicts the whole slice, re-integrates all atoms under it
//! and then corrects; it is only stable for very small `dzeta` because the
//! undamped resonant response grows with the elapsed `tau`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{AtomState, FieldPair, C64};
use crate::analytic::LaunchPulse;
use crate::detuning::DetuningDistribution;
use crate::dynamics::atom::{dark_state, integrate_cell, DarkPhase, RESOLUTION_LIMIT};
use crate::error::{Error, Result};
use crate::medium::MediumProfile;

/// Default per-substep resolution target used when the substep count is
/// derived automatically. Finer than `RESOLUTION_LIMIT` so that RK4 norm
/// drift stays at round-off level.
pub const DEFAULT_SUBSTEP_TARGET: f64 = 0.025;

/// Detuning classes below this count are integrated serially within a cell.
const PARALLEL_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Causal,
    Slice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarchSpec {
    /// Number of zeta steps.
    pub zeta_steps: usize,
    /// End of the march, us.
    pub zeta_end: f64,
    /// Store fields and atoms every `checkpoint_stride` zeta steps.
    pub checkpoint_stride: usize,
    /// Fixed RK4 substeps per tau cell; derived from `substep_target` when `None`.
    pub substeps: Option<usize>,
    pub substep_target: f64,
    /// Keep the atomic history (needed for conservation and Lax checks).
    pub store_atoms: bool,
    pub scheme: Scheme,
    /// Corrector evaluations per sample in the causal scheme; 1 is plain
    /// Heun, more passes iterate towards the implicit trapezoid rule.
    pub corrector_passes: usize,
}

impl MarchSpec {
    pub fn new(zeta_steps: usize, zeta_end: f64) -> Self {
        Self {
            zeta_steps,
            zeta_end,
            checkpoint_stride: 1,
            substeps: None,
            substep_target: DEFAULT_SUBSTEP_TARGET,
            store_atoms: true,
            scheme: Scheme::Causal,
            corrector_passes: 1,
        }
    }

    pub fn dzeta(&self) -> f64 {
        self.zeta_end / self.zeta_steps as f64
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.checkpoint_stride = stride;
        self
    }

    pub fn without_atoms(mut self) -> Self {
        self.store_atoms = false;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_corrector_passes(mut self, passes: usize) -> Self {
        self.corrector_passes = passes.max(1);
        self
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = Some(substeps);
        self
    }
}

/// Field history `Omega_±(tau_i, zeta_j)` at the stored checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub tau0: f64,
    pub dtau: f64,
    pub n_tau: usize,
    pub zeta: Vec<f64>,
    /// Row-major `[zeta][tau]`.
    pub values: Vec<FieldPair>,
}

impl FieldGrid {
    pub fn n_zeta(&self) -> usize {
        self.zeta.len()
    }

    pub fn tau(&self, i: usize) -> f64 {
        self.tau0 + i as f64 * self.dtau
    }

    pub fn slice(&self, j: usize) -> &[FieldPair] {
        &self.values[j * self.n_tau..(j + 1) * self.n_tau]
    }

    pub fn at(&self, i: usize, j: usize) -> FieldPair {
        self.values[j * self.n_tau + i]
    }

    pub fn last_slice(&self) -> &[FieldPair] {
        self.slice(self.n_zeta() - 1)
    }
}

/// Atomic history `psi(tau_i, zeta_j, Delta_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomGrid {
    pub n_tau: usize,
    pub n_delta: usize,
    pub zeta: Vec<f64>,
    /// Row-major `[zeta][tau][delta]`.
    pub values: Vec<AtomState>,
}

impl AtomGrid {
    pub fn n_zeta(&self) -> usize {
        self.zeta.len()
    }

    /// All detuning classes at `(tau_i, zeta_j)`.
    pub fn at(&self, i: usize, j: usize) -> &[AtomState] {
        let start = (j * self.n_tau + i) * self.n_delta;
        &self.values[start..start + self.n_delta]
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub fields: FieldGrid,
    pub atoms: AtomGrid,
    pub substeps: usize,
    /// Largest `| |psi|^2 - 1 |` seen anywhere during the march.
    pub max_norm_drift: f64,
    /// Global index of the last zeta step taken (for resuming).
    pub last_step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialAtoms {
    /// Dark state of the field at `tau_min`.
    DarkOfField,
    /// The given state for every detuning class.
    Given(AtomState),
}

/// `S_± = i g sum_k w_k psi_e conj(psi_±)` for one `(tau, zeta)` point,
/// summed in node order.
pub fn polarization_source(atoms: &[AtomState], nu: &DetuningDistribution, coupling: f64) -> FieldPair {
    let mut sp = C64::new(0.0, 0.0);
    let mut sm = C64::new(0.0, 0.0);
    for (a, w) in atoms.iter().zip(nu.weights()) {
        sp += a.e * a.p.conj() * *w;
        sm += a.e * a.m.conj() * *w;
    }
    let ig = C64::new(0.0, coupling);
    FieldPair::new(ig * sp, ig * sm)
}

struct SliceSolution {
    /// `[delta][tau]`
    atoms: Vec<Vec<AtomState>>,
    norm_drift: f64,
}

struct Marcher<'a> {
    dtau: f64,
    nu: &'a DetuningDistribution,
    substeps: usize,
    passes: usize,
    initial: InitialAtoms,
}

impl Marcher<'_> {
    fn solve(&self, fields: &[FieldPair]) -> Result<SliceSolution> {
        let start = self.start_state(&fields[0])?;
        let per_delta: Vec<(Vec<AtomState>, f64)> = self
            .nu
            .nodes()
            .par_iter()
            .map(|&delta| {
                let mut out = Vec::with_capacity(fields.len());
                let mut psi = start;
                let mut drift: f64 = (psi.norm_sqr() - 1.0).abs();
                out.push(psi);
                for w in fields.windows(2) {
                    psi = integrate_cell(&psi, &w[0], &w[1], delta, self.dtau, self.substeps);
                    drift = drift.max((psi.norm_sqr() - 1.0).abs());
                    out.push(psi);
                }
                (out, drift)
            })
            .collect();
        let norm_drift = per_delta.iter().fold(0.0, |m: f64, p| m.max(p.1));
        Ok(SliceSolution {
            atoms: per_delta.into_iter().map(|p| p.0).collect(),
            norm_drift,
        })
    }

    fn start_state(&self, field: &FieldPair) -> Result<AtomState> {
        match self.initial {
            InitialAtoms::DarkOfField => dark_state(field, DarkPhase::RealMinus),
            InitialAtoms::Given(s) => Ok(s),
        }
    }

    /// Advances every detuning class across one tau cell (or initializes it
    /// when `from` is `None`), returning the new states.
    fn advance(&self, prev: &[AtomState], from: Option<&FieldPair>, to: &FieldPair, out: &mut [AtomState]) -> Result<()> {
        match from {
            None => {
                let s = self.start_state(to)?;
                out.iter_mut().for_each(|o| *o = s);
            }
            Some(f) => {
                let cell = |(o, (p, d)): (&mut AtomState, (&AtomState, &f64))| {
                    *o = integrate_cell(p, f, to, *d, self.dtau, self.substeps);
                };
                if self.nu.len() >= PARALLEL_NODES {
                    out.par_iter_mut()
                        .zip(prev.par_iter().zip(self.nu.nodes().par_iter()))
                        .for_each(cell);
                } else {
                    out.iter_mut().zip(prev.iter().zip(self.nu.nodes())).for_each(cell);
                }
            }
        }
        Ok(())
    }

    /// One zeta step with the predictor-corrector applied sample by sample
    /// inside the tau sweep.
    fn causal_step(
        &self,
        current: &[FieldPair],
        source: &[FieldPair],
        dzeta: f64,
        coupling: f64,
        zeta_index: usize,
    ) -> Result<(Vec<FieldPair>, SliceSolution, Vec<FieldPair>)> {
        let n_tau = current.len();
        let n_delta = self.nu.len();
        let mut next = Vec::with_capacity(n_tau);
        let mut new_source = Vec::with_capacity(n_tau);
        let mut atoms = vec![Vec::with_capacity(n_tau); n_delta];
        let mut prev = vec![AtomState::default(); n_delta];
        let mut trial = vec![AtomState::default(); n_delta];
        let mut fresh = vec![AtomState::default(); n_delta];
        let mut drift: f64 = 0.0;
        for i in 0..n_tau {
            let from = (i > 0).then(|| next[i - 1]);
            let predicted = FieldPair::new(current[i].p + source[i].p * dzeta, current[i].m + source[i].m * dzeta);
            let mut corrected = predicted;
            for _ in 0..self.passes {
                self.advance(&prev, from.as_ref(), &corrected, &mut trial)?;
                let s_trial = polarization_source(&trial, self.nu, coupling);
                corrected = FieldPair::new(
                    current[i].p + (source[i].p + s_trial.p) * (0.5 * dzeta),
                    current[i].m + (source[i].m + s_trial.m) * (0.5 * dzeta),
                );
            }
            if !corrected.is_finite() {
                return Err(Error::NonFinite {
                    tau_index: i,
                    zeta_index,
                });
            }
            self.advance(&prev, from.as_ref(), &corrected, &mut fresh)?;
            new_source.push(polarization_source(&fresh, self.nu, coupling));
            next.push(corrected);
            for (row, a) in atoms.iter_mut().zip(&fresh) {
                drift = drift.max((a.norm_sqr() - 1.0).abs());
                row.push(*a);
            }
            std::mem::swap(&mut prev, &mut fresh);
        }
        Ok((next, SliceSolution { atoms, norm_drift: drift }, new_source))
    }

    fn source(&self, sol: &SliceSolution, coupling: f64) -> Vec<FieldPair> {
        let n_tau = sol.atoms[0].len();
        let mut scratch = vec![AtomState::default(); self.nu.len()];
        (0..n_tau)
            .map(|i| {
                for (k, row) in sol.atoms.iter().enumerate() {
                    scratch[k] = row[i];
                }
                polarization_source(&scratch, self.nu, coupling)
            })
            .collect()
    }
}

fn axpy(base: &[FieldPair], a: f64, x: &[FieldPair]) -> Vec<FieldPair> {
    base.iter()
        .zip(x)
        .map(|(b, s)| FieldPair::new(b.p + s.p * a, b.m + s.m * a))
        .collect()
}

/// Number of RK4 substeps per tau cell needed to meet `target`.
pub fn required_substeps(fields: &[FieldPair], nu: &DetuningDistribution, dtau: f64, target: f64) -> usize {
    let omega = fields.iter().fold(0.0, |m: f64, f| m.max(f.magnitude()));
    let rate = omega.max(nu.max_abs_detuning());
    ((dtau * rate / target).ceil() as usize).max(1)
}

/// Marches the fields from the launch pulse at `zeta = 0` to `spec.zeta_end`.
pub fn propagate(
    launch: &LaunchPulse,
    medium: &MediumProfile,
    nu: &DetuningDistribution,
    initial: InitialAtoms,
    spec: &MarchSpec,
) -> Result<Propagation> {
    march(launch.tau0, launch.dtau, launch.fields.clone(), 0, medium, nu, initial, spec)
}

/// Continues a march from the last stored slice of `previous`, with the same
/// zeta spacing, until `spec.zeta_end`. The stored slice is not repeated.
/// Automatic substeps are derived from the resumed slice; pass the original
/// count with [`MarchSpec::with_substeps`] to reproduce an uninterrupted march.
pub fn resume(
    previous: &FieldGrid,
    last_step: usize,
    medium: &MediumProfile,
    nu: &DetuningDistribution,
    initial: InitialAtoms,
    spec: &MarchSpec,
) -> Result<Propagation> {
    march(
        previous.tau0,
        previous.dtau,
        previous.last_slice().to_vec(),
        last_step,
        medium,
        nu,
        initial,
        spec,
    )
}

#[allow(clippy::too_many_arguments)]
fn march(
    tau0: f64,
    dtau: f64,
    start: Vec<FieldPair>,
    first_step: usize,
    medium: &MediumProfile,
    nu: &DetuningDistribution,
    initial: InitialAtoms,
    spec: &MarchSpec,
) -> Result<Propagation> {
    if start.len() < 2 {
        return Err(Error::InvalidParameter("launch pulse needs >= 2 samples".into()));
    }
    if spec.zeta_steps == 0 || !(spec.zeta_end > 0.0) || spec.checkpoint_stride == 0 {
        return Err(Error::InvalidParameter(
            "march needs zeta_steps >= 1, zeta_end > 0 and checkpoint_stride >= 1".into(),
        ));
    }
    let dzeta = spec.dzeta();
    let n_tau = start.len();
    let substeps = match spec.substeps {
        Some(s) => {
            let omega = start.iter().fold(0.0, |m: f64, f| m.max(f.magnitude()));
            let product = dtau / s.max(1) as f64 * omega.max(nu.max_abs_detuning());
            if product > RESOLUTION_LIMIT {
                return Err(Error::StepTooLarge {
                    product,
                    limit: RESOLUTION_LIMIT,
                });
            }
            s.max(1)
        }
        None => required_substeps(&start, nu, dtau, spec.substep_target),
    };
    let marcher = Marcher {
        dtau,
        nu,
        substeps,
        passes: spec.corrector_passes.max(1),
        initial,
    };
    let n_delta = nu.len();
    let zeta_of = |step: usize| step as f64 * dzeta;

    let mut fields = FieldGrid {
        tau0,
        dtau,
        n_tau,
        zeta: Vec::new(),
        values: Vec::new(),
    };
    let mut atoms = AtomGrid {
        n_tau,
        n_delta,
        zeta: Vec::new(),
        values: Vec::new(),
    };
    let store = |fields: &mut FieldGrid, atoms: &mut AtomGrid, zeta: f64, f: &[FieldPair], sol: &SliceSolution| {
        fields.zeta.push(zeta);
        fields.values.extend_from_slice(f);
        if spec.store_atoms {
            atoms.zeta.push(zeta);
            atoms.values.reserve(n_tau * n_delta);
            for i in 0..n_tau {
                for row in &sol.atoms {
                    atoms.values.push(row[i]);
                }
            }
        }
    };

    let mut current = start;
    let mut sol = marcher.solve(&current)?;
    let mut max_drift = sol.norm_drift;
    let mut source = marcher.source(&sol, medium.coupling_at(zeta_of(first_step)));
    if first_step == 0 {
        store(&mut fields, &mut atoms, 0.0, &current, &sol);
    }

    let mut step = first_step;
    while zeta_of(step) < spec.zeta_end * (1.0 - 1e-12) {
        let next_zeta = zeta_of(step + 1);
        let g_next = medium.coupling_at(next_zeta);
        match spec.scheme {
            Scheme::Causal => {
                let (next, next_sol, next_source) = marcher.causal_step(&current, &source, dzeta, g_next, step + 1)?;
                current = next;
                sol = next_sol;
                source = next_source;
                max_drift = max_drift.max(sol.norm_drift);
            }
            Scheme::Slice => {
                let predicted = axpy(&current, dzeta, &source);
                let pred_sol = marcher.solve(&predicted)?;
                let pred_source = marcher.source(&pred_sol, g_next);
                let next: Vec<FieldPair> = current
                    .iter()
                    .zip(source.iter().zip(&pred_source))
                    .map(|(f, (a, b))| {
                        FieldPair::new(f.p + (a.p + b.p) * (0.5 * dzeta), f.m + (a.m + b.m) * (0.5 * dzeta))
                    })
                    .collect();
                if let Some(i) = next.iter().position(|f| !f.is_finite()) {
                    return Err(Error::NonFinite {
                        tau_index: i,
                        zeta_index: step + 1,
                    });
                }
                current = next;
                sol = marcher.solve(&current)?;
                max_drift = max_drift.max(sol.norm_drift).max(pred_sol.norm_drift);
                source = marcher.source(&sol, g_next);
            }
        }
        step += 1;
        if step % spec.checkpoint_stride == 0 {
            store(&mut fields, &mut atoms, next_zeta, &current, &sol);
        }
    }
    if fields.zeta.last().map_or(true, |&z| z < zeta_of(step)) {
        store(&mut fields, &mut atoms, zeta_of(step), &current, &sol);
    }
    Ok(Propagation {
        fields,
        atoms,
        substeps,
        max_norm_drift: max_drift,
        last_step: step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_vanishes_for_ground_states() {
        let nu = DetuningDistribution::sharp_line();
        let s = polarization_source(&[AtomState::ground_minus()], &nu, 40.0);
        assert_eq!(s, FieldPair::ZERO);
    }

    #[test]
    fn single_node_source() {
        let nu = DetuningDistribution::sharp_line();
        let a = AtomState::new(C64::new(0.1, 0.2), C64::new(0.5, -0.3), C64::new(0.0, 0.4));
        let s = polarization_source(&[a], &nu, 3.0);
        let x = a.e * a.p.conj();
        assert!((s.p - C64::new(0.0, 3.0) * x).norm() < 1e-15);
    }
}
