//! File formats, configuration and subcommands of the `nibblepack` binary,
//! on top of `nibblepack-core`.
//!
//! Every command writes its artifacts into `--out DIR`. JSON artifacts embed
//! the seed, the parameters and the version; with the same flags and seed
//! they are reproduced byte for byte, whatever the thread count.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use commands::{run, Outcome};
pub use config::Cli;
pub use error::CliError;
