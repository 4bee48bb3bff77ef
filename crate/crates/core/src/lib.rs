//! Slow-light polarization solitons in a three-level Lambda medium.
//!
//! The crate evaluates the closed-form single soliton of the
//! Maxwell-Liouville system, integrates the same system numerically in
//! retarded coordinates as an independent check, verifies the Lax-pair
//! zero-curvature condition, and checks the symplectic structure of the
//! soliton's fluctuation modes.
//!
//! Units: microseconds and megahertz (see [`units`]). Atomic basis order is
//! `(e, +, -)`.

pub mod amplitudes;
pub mod analytic;
pub mod detuning;
pub mod dynamics;
pub mod error;
pub mod lax;
pub mod medium;
pub mod modes;
pub mod regime;
pub mod scenario;
pub mod units;

pub use amplitudes::{AtomState, FieldPair, C64};
pub use detuning::{DetuningDistribution, LineShape};
pub use error::{Error, Result};
pub use medium::{coupling_from_atomic_data, AtomicData, MediumProfile};
pub use regime::{validate_regime, RegimeReport, RegimeStatus};
