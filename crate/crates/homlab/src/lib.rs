//! Std companion of `homlab-core`: JSON formats, experiment configs, report
//! files and the `homlab` command-line driver.

pub mod config;
pub mod error;
pub mod formats;
pub mod report;
pub mod run;

pub use config::{Command, ExperimentConfig, FamilySpec, Fixture, LawSpec, Source};
pub use error::CliError;
pub use formats::{BracketJson, MetricJetJson, TensorJson};
pub use report::{write_json, Table, SCHEMA_VERSION};
pub use run::{run_config, RunOutcome};
