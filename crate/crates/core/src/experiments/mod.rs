//! Experiment configuration, run directories, power-law fits and the
//! verification suites behind the command-line tool.

pub mod config;
pub mod families;
pub mod fit;
pub mod run;
pub mod verify;

pub use config::{ContinuationParams, DiagnosticsConfig, ExperimentConfig, InitialData, RunMode};
pub use families::{
    exact_state, initial_state, plane_wave, plane_wave_omega, poisson_kernel, random_band, sech,
    soliton,
};
pub use fit::{fit_power_law, PowerLawFit, MIN_FIT_POINTS};
pub use run::{
    diagnostics_header, read_schedule_csv, run_config, run_continuation, run_simulate, simulate,
    sweep, RunOutput, RunSummary, DIAGNOSTICS_FILE, SCHEDULE_FILE, SUMMARY_FILE,
};
pub use verify::{run_verify, Suite, SuiteItem, VerifyOptions, VerifyReport};
