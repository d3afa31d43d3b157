//! Library half of the `spinpair` command-line tool.
//!
//! Each subcommand is a plain function returning a typed report, so the
//! binary only parses flags, prints, and maps errors to exit codes.

pub mod commands;
pub mod error;
pub mod format;
pub mod measurement_file;

pub use error::CliError;
