//! Library side of the `pngsrc` binary, split out so the configuration and
//! subcommands can be tested without spawning a process.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::RunConfig;
pub use error::CliError;
