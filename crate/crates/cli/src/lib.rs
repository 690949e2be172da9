//! Config-driven runner that writes figure data and parameter sweeps as CSV.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::Path;

pub use config::ExperimentConfig;
pub use error::CliError;

/// Parse, run and write one experiment. Returns the warnings that were
/// reported; with `strict` any warning aborts before files are written.
pub fn run_config(text: &str, out: Option<&Path>, strict: bool) -> Result<Vec<String>, CliError> {
    let mut cfg = config::parse(text)?;
    if let Some(dir) = out {
        cfg.output = dir.to_path_buf();
    }
    let outcome = experiments::run(&cfg)?;
    if strict && !outcome.warnings.is_empty() {
        return Err(CliError::Strict(outcome.warnings));
    }
    output::write_run(&cfg.output, &outcome.tables, &config::resolved(&cfg))?;
    Ok(outcome.warnings)
}
