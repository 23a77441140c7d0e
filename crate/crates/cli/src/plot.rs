//! Matplotlib scripts for experiment CSVs.

use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotLayout {
    /// Log-log against `τ`, with the `τ` axis decreasing to the right.
    Tau,
    /// Linear against environment size.
    EnvironmentSize,
}

impl PlotLayout {
    fn x_column(self) -> &'static str {
        match self {
            PlotLayout::Tau => "tau",
            PlotLayout::EnvironmentSize => "n_E",
        }
    }
}

/// Chooses the layout from the CSV header and checks there is at least one row.
pub fn inspect_csv(path: &Path) -> Result<PlotLayout> {
    let file = std::fs::File::open(path).map_err(CliError::io(path))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let header = reader.headers()?.clone();
    let has = |name: &str| header.iter().any(|h| h == name);
    let layout = if has("tau") && has("mc_mean") {
        PlotLayout::Tau
    } else if has("n_E") && has("mc_mean") {
        PlotLayout::EnvironmentSize
    } else {
        return Err(CliError::Format(format!("{}: no plot layout for columns {:?}", path.display(), header)));
    };
    for col in ["mc_mean", "mc_stderr", "analytic", "bound"] {
        if !has(col) {
            return Err(CliError::Format(format!("{}: missing column '{col}'", path.display())));
        }
    }
    if reader.records().next().transpose()?.is_none() {
        return Err(CliError::Format(format!("{}: no data rows", path.display())));
    }
    Ok(layout)
}

pub fn plot_script(csv_name: &str, png_name: &str, layout: PlotLayout) -> String {
    let x = layout.x_column();
    let (xlabel, axes) = match layout {
        PlotLayout::Tau => {
            ("pulse interval tau", "ax.set_xscale(\"log\")\nax.set_yscale(\"log\")\nax.invert_xaxis()\n")
        }
        PlotLayout::EnvironmentSize => ("environment modes n_E", ""),
    };
    format!(
        r##"import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "{csv_name}")) as fh:
    rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))

x = [float(r["{x}"]) for r in rows]
col = lambda name: [float(r[name]) for r in rows]

fig, ax = plt.subplots(figsize=(6, 4))
ax.errorbar(x, col("mc_mean"), yerr=col("mc_stderr"), fmt="o", capsize=3, label="Monte Carlo")
ax.plot(x, col("analytic"), "-", label="first-order estimate")
ax.plot(x, col("bound"), "--", label="upper bound")
{axes}ax.set_xlabel("{xlabel}")
ax.set_ylabel("expected gate error")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "{png_name}"), dpi=150)
"##
    )
}

/// Writes `<stem>_plot.py` next to the CSV and returns its path.
pub fn emit_plot_script(csv_path: &Path) -> Result<PathBuf> {
    let layout = inspect_csv(csv_path)?;
    let stem = csv_path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CliError::Usage(format!("{}: not a file name", csv_path.display())))?;
    let csv_name = csv_path.file_name().and_then(|s| s.to_str()).unwrap_or(stem);
    let script_path = csv_path.with_file_name(format!("{stem}_plot.py"));
    let script = plot_script(csv_name, &format!("{stem}.png"), layout);
    std::fs::write(&script_path, script).map_err(CliError::io(&script_path))?;
    Ok(script_path)
}
