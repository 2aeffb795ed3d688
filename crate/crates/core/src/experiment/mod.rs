//! Scenario files, result files and the drivers behind each subcommand.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::*;
pub use config::{emit_config, parse_config};
pub use output::{fmt_num, RunManifest};
