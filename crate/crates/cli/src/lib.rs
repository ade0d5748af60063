//! Command-line front end for the `slocc` library: JSON state files in, JSON
//! reports out.

pub mod commands;
pub mod error;
pub mod report;
pub mod selftest;
pub mod state_file;

pub use error::CliError;
pub use state_file::{State, StateFile, StateKind};
