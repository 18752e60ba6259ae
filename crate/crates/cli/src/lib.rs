//! Configuration, suite dispatch and report emission for the `ftb` binary.

pub mod config;
pub mod report;
pub mod run;

pub use config::{ConfigError, PointSource, RunConfig};
pub use report::{to_json, Report};
pub use run::{run, CliError, Mode, Outcome};
