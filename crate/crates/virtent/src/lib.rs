//! Reports, sweeps and the command-line front end for `virtent_core`.

pub mod checks;
pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod report;
pub mod svg;
pub mod sweeps;
pub mod table;

pub use error::{CliError, Result};
