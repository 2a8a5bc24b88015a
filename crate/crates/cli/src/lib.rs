//! Command-line front end for the dispersive toolkit.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod plot;

pub use commands::run;
pub use error::CliError;
