//! Experiment runner for the driven-cavity simulator: configuration, named
//! experiments and deterministic CSV/JSON output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{load_config, Experiment, ExperimentConfig, Overrides};
pub use error::{CliError, Result};
pub use experiments::{run_experiment, RunReport};
