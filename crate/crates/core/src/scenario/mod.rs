//! Scenario orchestration behind the command-line verbs.

pub mod config;
pub mod report;
pub mod run;

pub use config::{
    apply_override, BackgroundSpec, DetuningSpec, GridSpec, MediumSpec, OutputFormat, OutputSpec, ResolvedGrid,
    ScenarioConfig, ScenarioKind,
};
pub use report::{write_output, Artifact, Bound, Check, Report, ScenarioOutput};
pub use run::{run_pde, run_scenario, run_with_threads, PdeRun, FIGURE1_HEADER, ORACLE_HEADER};
