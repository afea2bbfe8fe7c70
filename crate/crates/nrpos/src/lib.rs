//! Experiment driver for `nrpos-core`: configuration files, Monte Carlo
//! runs over seeded realizations, parameter sweeps and CSV output.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use config::{Config, ExperimentConfig};
pub use error::CliError;
