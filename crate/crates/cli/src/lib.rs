//! Std companion to `callroute-core`: experiment configs, topology files,
//! the parallel run driver and CSV outputs.

pub mod config;
pub mod error;
pub mod fmt;
pub mod output;
pub mod report;
pub mod runner;
pub mod topofile;

pub use error::{CliError, Result};
