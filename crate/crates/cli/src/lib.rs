//! Batch experiment runner for symplectic dynamical decoupling: Monte Carlo sweeps,
//! Eulerian schedules, Fock-space cross-checks and the verification suite.

pub mod config;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use config::{ConfigOverrides, ExperimentConfig, Mode};
pub use error::{CliError, Result};

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(CliError::io(path))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Resolves the configuration and runs one command. Tables go to `--out` (with a
/// plot script or pulse schedule alongside) or to `stdout`; the verify report always
/// goes to `stdout`.
pub fn execute(mode: Mode, overrides: ConfigOverrides, stdout: &mut dyn Write) -> Result<()> {
    let cfg = overrides.resolve(mode)?;
    let emit = |text: &str, stdout: &mut dyn Write| -> Result<()> {
        stdout.write_all(text.as_bytes()).map_err(CliError::io("<stdout>"))
    };
    match mode {
        Mode::Verify => {
            let report = verify::run_verify(&cfg);
            let text = format!("{report}\n");
            if let Some(out) = &cfg.out {
                write_file(out, &text)?;
            }
            emit(&text, stdout)?;
            report.into_result().map(|_| ())
        }
        Mode::Eulerian => {
            let run = experiments::eulerian(&cfg)?;
            let csv = run.table.to_csv()?;
            match &cfg.out {
                Some(out) => {
                    write_file(out, &csv)?;
                    write_file(&sibling(out, "_pulses.txt"), &run.schedule)
                }
                None => emit(&csv, stdout),
            }
        }
        _ => {
            let csv = experiments::run(&cfg)?.to_csv()?;
            match &cfg.out {
                Some(out) => {
                    write_file(out, &csv)?;
                    if matches!(mode, Mode::Homogenize | Mode::Suppress) {
                        plot::emit_plot_script(out)?;
                    }
                    Ok(())
                }
                None => emit(&csv, stdout),
            }
        }
    }
}
