//! Command-line front end: configuration parsing, dispatch to the protocol
//! and key-distribution runners, and report/table/plot-data emission.

pub mod config;
pub mod error;
pub mod output;
pub mod report;

pub use config::{parse_config, Experiment, ExperimentConfig};
pub use error::CliError;
pub use output::emit_plot_data;
pub use report::{run_and_report, Outcome, ReportBundle};
