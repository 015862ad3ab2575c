//! File formats, configuration, experiment runner and verification suites
//! for the `gaugeqm` command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod report;
pub mod run;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::Failure;
pub use report::RunReport;
