//! Command-line layer for shearkit: file formats, configuration, reports
//! and the acceptance runner.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod document;
pub mod error;
pub mod formats;
pub mod table;

pub use error::{CliError, Result};
