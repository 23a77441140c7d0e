//! Experiment configuration: `key = value` files, command-line overrides and the
//! resolved settings echoed into every output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Prefix marking echoed configuration lines inside output metadata. Such lines
/// are read back as settings, so an output file can serve as its own config.
pub const ECHO_PREFIX: &str = "#!";

/// First characters of every output file.
pub const ARTIFACT_MARKER: &str = "# sympdd ";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Homogenize,
    Suppress,
    Eulerian,
    Verify,
    FockCheck,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Homogenize => "homogenize",
            Mode::Suppress => "suppress",
            Mode::Eulerian => "eulerian",
            Mode::Verify => "verify",
            Mode::FockCheck => "fock-check",
        }
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "homogenize" => Ok(Mode::Homogenize),
            "suppress" => Ok(Mode::Suppress),
            "eulerian" => Ok(Mode::Eulerian),
            "verify" => Ok(Mode::Verify),
            "fock-check" => Ok(Mode::FockCheck),
            other => Err(CliError::Usage(format!("unknown mode '{other}'"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deliberate faults for exercising the verification report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Feed an asymmetric `A` into model construction.
    Asymmetric,
}

impl FromStr for Fault {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymmetric" => Ok(Fault::Asymmetric),
            other => Err(CliError::Usage(format!("unknown fault '{other}'"))),
        }
    }
}

/// Settings as given in a file or on the command line; unset fields fall back to
/// the mode's defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub mode: Option<Mode>,
    pub n: Option<usize>,
    pub n_s: Option<usize>,
    pub n_e_max: Option<usize>,
    pub n_e: Option<Vec<usize>>,
    pub k: Option<f64>,
    pub taus: Option<Vec<f64>>,
    pub t: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub repetitions: Option<Vec<usize>>,
    pub substeps: Option<usize>,
    pub fault: Option<Fault>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| CliError::Usage(format!("invalid value '{value}' for '{key}'")))
}

pub fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> =
        value.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_value(key, s)).collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(CliError::Usage(format!("'{key}' needs at least one value")));
    }
    Ok(items)
}

impl ConfigOverrides {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mode" => self.mode = Some(value.trim().parse()?),
            "n" => self.n = Some(parse_value(key, value)?),
            "ns" | "n_s" => self.n_s = Some(parse_value(key, value)?),
            "ne_max" | "ne-max" => self.n_e_max = Some(parse_value(key, value)?),
            "ne" | "n_e" => self.n_e = Some(parse_list(key, value)?),
            "k" => self.k = Some(parse_value(key, value)?),
            "tau" => self.taus = Some(parse_list(key, value)?),
            "t" => self.t = Some(parse_value(key, value)?),
            "trials" => self.trials = Some(parse_value(key, value)?),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "repetitions" => self.repetitions = Some(parse_list(key, value)?),
            "substeps" => self.substeps = Some(parse_value(key, value)?),
            "fault" => self.fault = Some(value.trim().parse()?),
            other => return Err(CliError::Usage(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment unless the line begins with
    /// the echo prefix. In a file written by this tool (first line
    /// [`ARTIFACT_MARKER`]) only the echoed lines are read.
    pub fn parse(text: &str) -> Result<Self> {
        let artifact = text.starts_with(ARTIFACT_MARKER);
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.trim().strip_prefix(ECHO_PREFIX) {
                Some(echoed) => echoed,
                None if artifact => continue,
                None => raw.split('#').next().unwrap_or(""),
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("line {}: expected 'key = value'", lineno + 1)))?;
            cfg.set(key.trim(), value)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        Self::parse(&text)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merged_with(mut self, other: ConfigOverrides) -> Self {
        macro_rules! take {
            ($($field:ident),*) => { $( if other.$field.is_some() { self.$field = other.$field; } )* };
        }
        take!(mode, n, n_s, n_e_max, n_e, k, taus, t, trials, seed, out, repetitions, substeps, fault);
        self
    }

    pub fn resolve(self, mode: Mode) -> Result<ExperimentConfig> {
        ExperimentConfig::resolve(mode, self)
    }
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    pub n_s: usize,
    pub n_e: Vec<usize>,
    pub k: f64,
    pub taus: Vec<f64>,
    pub t: f64,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub repetitions: Vec<usize>,
    pub substeps: usize,
    pub fault: Option<Fault>,
}

pub const DEFAULT_SEED: u64 = 1;

fn default_taus() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5]
}

impl ExperimentConfig {
    pub fn resolve(mode: Mode, o: ConfigOverrides) -> Result<Self> {
        if let Some(file_mode) = o.mode {
            if file_mode != mode {
                return Err(CliError::Usage(format!("config is for '{file_mode}', command is '{mode}'")));
            }
        }
        let n_e_max = o.n_e_max.unwrap_or(80);
        let cfg = Self {
            mode,
            n: o.n.unwrap_or(if mode == Mode::Eulerian { 1 } else { 4 }),
            n_s: o.n_s.unwrap_or(2),
            n_e: o.n_e.unwrap_or_else(|| (1..=n_e_max).collect()),
            k: o.k.unwrap_or(if mode == Mode::Suppress { 0.1 } else { 1.0 }),
            taus: o.taus.unwrap_or_else(|| if mode == Mode::Suppress { vec![1e-3] } else { default_taus() }),
            t: o.t.unwrap_or(1.0),
            trials: o.trials.unwrap_or(20),
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            out: o.out,
            repetitions: o.repetitions.unwrap_or_else(|| vec![8, 16, 32, 64]),
            substeps: o.substeps.unwrap_or(16),
            fault: o.fault,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if self.n == 0 || self.n_s == 0 {
            return bad("mode counts must be positive".into());
        }
        if self.taus.iter().any(|&tau| !(tau.is_finite() && tau > 0.0)) {
            return bad(format!("tau values must be positive: {:?}", self.taus));
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return bad(format!("t must be positive, got {}", self.t));
        }
        if !(self.k.is_finite() && self.k >= 0.0) {
            return bad(format!("k must be nonnegative, got {}", self.k));
        }
        if self.trials == 0 || self.substeps == 0 || self.repetitions.contains(&0) {
            return bad("trials, sub-steps and repetitions must be positive".into());
        }
        if self.mode == Mode::Suppress && self.taus.len() != 1 {
            return bad("suppression sweeps take a single tau".into());
        }
        Ok(())
    }

    /// `#! key = value` lines that reproduce this configuration when parsed.
    pub fn echo_lines(&self) -> Vec<String> {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
        }
        let mut lines = vec![format!("mode = {}", self.mode)];
        match self.mode {
            Mode::Homogenize => {
                lines.push(format!("n = {}", self.n));
                lines.push(format!("k = {}", self.k));
                lines.push(format!("tau = {}", join(&self.taus)));
            }
            Mode::Suppress => {
                lines.push(format!("ns = {}", self.n_s));
                lines.push(format!("ne = {}", join(&self.n_e)));
                lines.push(format!("k = {}", self.k));
                lines.push(format!("tau = {}", join(&self.taus)));
            }
            Mode::Eulerian => {
                lines.push(format!("n = {}", self.n));
                lines.push(format!("k = {}", self.k));
                lines.push(format!("repetitions = {}", join(&self.repetitions)));
                lines.push(format!("substeps = {}", self.substeps));
            }
            Mode::Verify | Mode::FockCheck => {}
        }
        lines.push(format!("t = {}", self.t));
        if matches!(self.mode, Mode::Homogenize | Mode::Suppress | Mode::Verify) {
            lines.push(format!("trials = {}", self.trials));
        }
        lines.push(format!("seed = {}", self.seed));
        lines.into_iter().map(|l| format!("{ECHO_PREFIX} {l}")).collect()
    }
}
