//! Config-driven experiment runner for the predator-prey engines.

pub mod args;
pub mod config;
pub mod experiment;
pub mod output;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use experiment::{run_experiment, MANIFEST};
