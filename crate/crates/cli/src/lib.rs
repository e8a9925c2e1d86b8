//! Batch driver for the distorted Fourier toolkit: configuration, pipelines
//! and the JSON run report.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run, Command, Outcome, RunError, Tolerances};
pub use config::{ConfigError, FunctionSpec, RunConfig};
pub use report::Report;
