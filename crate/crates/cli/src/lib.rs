//! Experiment driver behind the `nonlocal-lab` binary: configuration,
//! experiment runners, CSV output and the run manifest.

pub mod config;
pub mod csv;
pub mod error;
pub mod experiments;
pub mod manifest;

use std::fs;
use std::time::Instant;

pub use config::{Cli, Experiment, ExperimentConfig, Profile};
pub use error::CliError;
pub use manifest::Manifest;

/// Runs one experiment and writes its CSV files and `manifest.json` into
/// the configured output directory.
pub fn run(config: &ExperimentConfig) -> Result<Manifest, CliError> {
    let start = Instant::now();
    let mut outputs = experiments::run(config)?;
    outputs.files.sort_by(|a, b| a.0.cmp(&b.0));

    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut entries = Vec::with_capacity(outputs.files.len());
    for (name, table) in &outputs.files {
        let text = csv::render(table)?;
        let path = dir.join(name);
        fs::write(&path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        entries.push(manifest::OutputEntry { file: name.clone(), sha256: manifest::sha256_hex(text.as_bytes()) });
    }

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        threads: rayon::current_num_threads(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        outputs: entries,
        notes: outputs.notes,
        fits: outputs.fits,
    };
    manifest.write(dir)?;
    Ok(manifest)
}
