//! Experiment runner behind the `elastic-scatter` binary.
//!
//! Each subcommand reads a JSON configuration, evaluates its sweep points in
//! parallel, and writes CSV tables plus a JSON report under an output prefix.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod report;
pub mod run;

pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use run::{run, RunOptions};
