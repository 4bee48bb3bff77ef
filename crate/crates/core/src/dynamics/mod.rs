//! Direct integration of the Maxwell-Liouville system.

pub mod analysis;
pub mod atom;
pub mod checkpoint;
pub mod propagate;

pub use analysis::{analyze_history, conservation_residual, track_soliton, ConservationReport, DynamicsReport, SolitonTrack};
pub use atom::{apply_hamiltonian, dark_state, liouville_step, DarkPhase};
pub use propagate::{
    polarization_source, propagate, resume, AtomGrid, FieldGrid, InitialAtoms, MarchSpec, Propagation,
};
