//! Subcommand implementations. Each returns the process exit code.

pub mod classify;
pub mod curves;
pub mod portrait;
pub mod simulate;
pub mod sweep;

use std::path::PathBuf;

use crate::config::RunConfig;
use crate::output::{Format, Provenance, Sink};

/// Everything a subcommand needs besides its own flags.
pub struct Context {
    pub config: RunConfig,
    /// Directory of the config file, for relative profile paths.
    pub base: PathBuf,
    pub provenance: Provenance,
    pub sink: Sink,
    pub format: Format,
}

impl Context {
    pub fn extension(&self) -> &'static str {
        match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}
