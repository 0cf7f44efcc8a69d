//! File formats, parallel orchestration and the command-line front end for `survrank-core`.

pub mod cli;
pub mod cohort_csv;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod parallel;
pub mod schema_file;

pub use error::{CliError, CliResult};
