//! Config-driven runner for the `labelqm` experiments.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{parse_config, ConfigError, Experiment, ExperimentConfig, Format};
pub use emit::{emit_report, Report};
pub use run::{config_hash, run_experiment, RunError};
