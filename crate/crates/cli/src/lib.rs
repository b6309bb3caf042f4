//! Configuration parsing and the `solve` / `compare` commands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

pub use commands::{compare_command, run_command, CliError};
pub use config::{load_config, parse_config, RunConfig};
