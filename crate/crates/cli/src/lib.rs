//! Command-line front end for `hardylab`: TOML run configs, task execution and
//! JSON/CSV reports.

// `!(x > 0.0)` is used on purpose: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod instances;
pub mod preset;
pub mod report;
pub mod run;

pub use config::{RunConfig, TaskConfig};
pub use error::CliError;
pub use report::{CurveRow, Report, Summary, TaskResult};
pub use run::{prepare, run, RunOptions, RunOutcome};
