//! Library side of the `roadmatch` command-line tool.

pub mod commands;
pub mod config;
pub mod error;

pub use config::{parse_config, RunConfig};
pub use error::CliError;
