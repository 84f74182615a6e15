//! Front end for the secure-consensus simulator: scenario files, built-ins, runs and reports.

pub mod builtin;
pub mod commands;
pub mod error;
pub mod file;
pub mod output;

pub use commands::{cmd_check_passivity, cmd_list_scenarios, cmd_run, RunArgs};
pub use error::CliError;
