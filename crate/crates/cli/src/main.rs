use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sympdd::config::{parse_list, ConfigOverrides, Mode};
use sympdd::{execute, plot, CliError, Result};

#[derive(Parser)]
#[command(name = "sympdd", version, about = "Symplectic dynamical decoupling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Homogenization gate error against the pulse interval.
    Homogenize(RunArgs),
    /// Decoherence-suppression gate error against environment size.
    Suppress(RunArgs),
    /// Eulerian-cycle homogenization and its pulse schedule.
    Eulerian(RunArgs),
    /// Run the invariant suite; exits 1 if any check fails.
    Verify(RunArgs),
    /// Truncated Fock-space evolution against the symplectic prediction.
    FockCheck(RunArgs),
    /// Write a matplotlib script for an existing sweep CSV.
    Plot { csv: PathBuf },
}

#[derive(Args, Default)]
struct RunArgs {
    /// `key = value` configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ns: Option<usize>,
    /// Sweep environment sizes 1..=N.
    #[arg(long = "ne-max")]
    ne_max: Option<usize>,
    /// Explicit comma-separated environment sizes.
    #[arg(long)]
    ne: Option<String>,
    #[arg(long)]
    k: Option<f64>,
    /// Comma-separated pulse intervals.
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated cycle repetition counts (eulerian).
    #[arg(long)]
    repetitions: Option<String>,
    /// Quadrature sub-steps per segment half (eulerian).
    #[arg(long)]
    substeps: Option<usize>,
    /// Inject a fault into verify (`asymmetric`).
    #[arg(long)]
    fault: Option<String>,
}

impl RunArgs {
    fn overrides(self) -> Result<ConfigOverrides> {
        let file = match &self.config {
            Some(path) => ConfigOverrides::from_file(path)?,
            None => ConfigOverrides::default(),
        };
        let flags = ConfigOverrides {
            mode: None,
            n: self.n,
            n_s: self.ns,
            n_e_max: self.ne_max,
            n_e: self.ne.as_deref().map(|v| parse_list("ne", v)).transpose()?,
            k: self.k,
            taus: self.tau.as_deref().map(|v| parse_list("tau", v)).transpose()?,
            t: self.t,
            trials: self.trials,
            seed: self.seed,
            out: self.out,
            repetitions: self.repetitions.as_deref().map(|v| parse_list("repetitions", v)).transpose()?,
            substeps: self.substeps,
            fault: self.fault.as_deref().map(str::parse).transpose()?,
        };
        let mut merged = file.merged_with(flags);
        if self.ne_max.is_some() && self.ne.is_none() {
            merged.n_e = None;
        }
        Ok(merged)
    }
}

fn run(command: Command) -> Result<()> {
    let (mode, args) = match command {
        Command::Homogenize(a) => (Mode::Homogenize, a),
        Command::Suppress(a) => (Mode::Suppress, a),
        Command::Eulerian(a) => (Mode::Eulerian, a),
        Command::Verify(a) => (Mode::Verify, a),
        Command::FockCheck(a) => (Mode::FockCheck, a),
        Command::Plot { csv } => {
            let script = plot::emit_plot_script(&csv)?;
            println!("{}", script.display());
            return Ok(());
        }
    };
    let mut stdout = std::io::stdout().lock();
    execute(mode, args.overrides()?, &mut stdout)?;
    stdout.flush().map_err(CliError::io("<stdout>"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sympdd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
