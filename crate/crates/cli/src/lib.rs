//! The `tate` command-line tool: argument parsing, dispatch and reports.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run, Outcome};
pub use config::{Cli, RunConfig};
pub use report::{Body, Check, Report};
