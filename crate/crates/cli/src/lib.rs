//! Command implementations behind the `zeno` binary.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod curve_io;
pub mod error;
pub mod reproduce;

pub use error::{CliError, CliResult};
