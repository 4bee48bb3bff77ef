//! Closed-form soliton and its derived observables.

pub mod background;
pub mod frame;
pub mod observables;
pub mod params;
pub mod soliton;
pub mod stokes;

pub use background::{BackgroundField, RampSpec};
pub use frame::{apply_polarization_frame, PolarizationFrame};
pub use observables::{
    fractional_loss, min_length_for_loss, peak_excited_population, soliton_length_and_loss,
    soliton_length_us, soliton_velocity, LengthAndLoss,
};
pub use params::SolitonParams;
pub use soliton::{evaluate_soliton, launch_pulse, LaunchPulse, SolitonSolution, SolitonState};
pub use stokes::{stokes, stokes_of, stokes_with, Handedness, StokesRecord};
