//! Experiment runners producing CSV tables with self-describing metadata.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::Rng;
use sympdd_core::averaging::PartitionedModel;
use sympdd_core::error_analysis::{analytic_approximation, gate_error, monte_carlo_expected_error, Scenario};
use sympdd_core::eulerian::{orthogonal_path_rate, project_onto_j, EulerianScheme};
use sympdd_core::fock::{beamsplitter, heisenberg_check};
use sympdd_core::groups::{enumerate_homogenization_group, GroupElement, GroupSpec, Monomial, SignedPermutation};
use sympdd_core::schemes::target_evolution;
use sympdd_core::seeding::{derive_seed, rng_from_seed};
use sympdd_core::symplectic::{max_abs, op_norm};
use sympdd_core::{Basis, Matrix, QuadraticModel};

use crate::config::{ExperimentConfig, Mode, ARTIFACT_MARKER};
use crate::error::{CliError, Result};

pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seed stream reserved for drawing the random model; trial streams use `0..`.
pub const MODEL_STREAM: u64 = u64::MAX;

/// Largest `n` accepted by the Eulerian runner (`|G||Γ| = 384` segments at `n = 3`).
pub const MAX_EULERIAN_MODES: usize = 3;

pub const HOMOGENIZE_COLUMNS: [&str; 7] = ["tau", "mc_mean", "mc_stderr", "analytic", "bound", "trials", "seed"];
pub const SUPPRESS_COLUMNS: [&str; 5] = ["n_E", "mc_mean", "mc_stderr", "analytic", "bound"];
pub const EULERIAN_COLUMNS: [&str; 5] = ["repetitions", "tau", "deviation", "first_order_residual", "lambda"];
pub const FOCK_COLUMNS: [&str; 5] = ["model", "cutoff", "t", "defect", "unitarity_defect"];

/// A CSV body plus `#` metadata lines and the echoed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: &'static str,
    pub metadata: Vec<String>,
    pub echo: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(cfg: &ExperimentConfig, header: &[&'static str]) -> Self {
        Self {
            schema: cfg.mode.name(),
            metadata: Vec::new(),
            echo: cfg.echo_lines(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(out, "{ARTIFACT_MARKER}{VERSION} schema={}/{CSV_SCHEMA_VERSION}", self.schema);
        for line in &self.metadata {
            let _ = writeln!(out, "# {line}");
        }
        for line in &self.echo {
            let _ = writeln!(out, "{line}");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Format(e.to_string()))?);
        Ok(out)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| *h == name)?;
        self.rows.iter().map(|r| r[idx].parse().ok()).collect()
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Symmetrization of a matrix with i.i.d. entries uniform on `[0, k]`.
pub fn random_symmetric(dim: usize, k: f64, seed: u64) -> Matrix {
    let mut rng = rng_from_seed(seed);
    let m = DMatrix::from_fn(dim, dim, |_, _| rng.random::<f64>() * k);
    (&m + m.transpose()) * 0.5
}

pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    match cfg.mode {
        Mode::Homogenize => homogenize(cfg),
        Mode::Suppress => suppress(cfg),
        Mode::Eulerian => eulerian(cfg).map(|r| r.table),
        Mode::FockCheck => fock_check(cfg),
        Mode::Verify => Err(CliError::Usage("verify produces a report, not a table".into())),
    }
}

/// Monte Carlo gate error against the first-order estimate and the upper bound,
/// one row per `τ`, for a random `A` drawn once per run.
pub fn homogenize(cfg: &ExperimentConfig) -> Result<Table> {
    let a = random_symmetric(2 * cfg.n, cfg.k, derive_seed(cfg.seed, MODEL_STREAM));
    let scenario = Scenario::Homogenization(QuadraticModel::new(a.clone(), Basis::Block)?);
    let mut table = Table::new(cfg, &HOMOGENIZE_COLUMNS);
    table.metadata.push(format!("realized_k = {}", num(max_abs(&a))));
    table.metadata.push(format!("op_norm_A = {}", num(op_norm(&a))));
    table.metadata.push(format!("deviation_norm_sq = {}", num(scenario.deviation_norm_sq()?)));
    for (i, &tau) in cfg.taus.iter().enumerate() {
        let seed = derive_seed(cfg.seed, i as u64);
        let est = monte_carlo_expected_error(&scenario, tau, cfg.t, cfg.trials, seed)?;
        table.metadata.push(format!("tau = {}: steps = {}", num(tau), est.steps));
        if let Some(w) = est.rounding_warning() {
            table.metadata.push(format!("warning: {w}"));
        }
        table.rows.push(vec![
            num(tau),
            num(est.mean),
            num(est.std_error),
            num(analytic_approximation(&scenario, tau, est.t)?),
            num(scenario.upper_bound(tau, est.t)),
            cfg.trials.to_string(),
            seed.to_string(),
        ]);
    }
    Ok(table)
}

/// Suppression sweep over environment sizes. Each model is the leading block of
/// one random matrix for the largest `n_E`, so rows differ only by added modes.
pub fn suppress(cfg: &ExperimentConfig) -> Result<Table> {
    let tau = cfg.taus[0];
    let n_e_max = cfg.n_e.iter().copied().max().unwrap_or(0);
    let full = random_symmetric(2 * (cfg.n_s + n_e_max), cfg.k, derive_seed(cfg.seed, MODEL_STREAM));
    let mut table = Table::new(cfg, &SUPPRESS_COLUMNS);
    for (i, &n_e) in cfg.n_e.iter().enumerate() {
        let d = 2 * (cfg.n_s + n_e);
        let pm = PartitionedModel::new(full.view((0, 0), (d, d)).into_owned(), cfg.n_s, n_e)?;
        let realized_k = pm.k();
        let scenario = Scenario::Suppression(pm);
        let est = monte_carlo_expected_error(&scenario, tau, cfg.t, cfg.trials, derive_seed(cfg.seed, i as u64))?;
        table.metadata.push(format!("n_E = {n_e}: realized_k = {}, steps = {}", num(realized_k), est.steps));
        if let Some(w) = est.rounding_warning() {
            table.metadata.push(format!("warning: {w}"));
        }
        table.rows.push(vec![
            n_e.to_string(),
            num(est.mean),
            num(est.std_error),
            num(analytic_approximation(&scenario, tau, est.t)?),
            num(scenario.upper_bound(tau, est.t)),
        ]);
    }
    Ok(table)
}

/// `J`, a sign flip on mode 0, and (for `n ≥ 2`, `n ≥ 3`) a transposition and an
/// `n`-cycle: a generating set of the homogenization group.
pub fn homogenization_generators(n: usize) -> Result<Vec<Monomial>> {
    let mut flip = vec![1i8; n];
    flip[0] = -1;
    let mut gens = vec![
        GroupElement::j(n).monomial(),
        GroupElement::new(SignedPermutation::new((0..n).collect(), flip)?, 0)?.monomial(),
    ];
    if n >= 2 {
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        gens.push(GroupElement::new(SignedPermutation::new(swap, vec![1; n])?, 0)?.monomial());
    }
    if n >= 3 {
        let cycle = (0..n).map(|i| (i + 1) % n).collect();
        gens.push(GroupElement::new(SignedPermutation::new(cycle, vec![1; n])?, 0)?.monomial());
    }
    Ok(gens)
}

pub fn homogenization_scheme(n: usize) -> Result<EulerianScheme> {
    if n == 0 || n > MAX_EULERIAN_MODES {
        return Err(CliError::Usage(format!("eulerian runs need 1 ≤ n ≤ {MAX_EULERIAN_MODES}, got {n}")));
    }
    let group: Vec<Monomial> = enumerate_homogenization_group(n)?.iter().map(GroupElement::monomial).collect();
    Ok(EulerianScheme::new(&group, &homogenization_generators(n)?, Basis::Block)?)
}

#[derive(Debug, Clone)]
pub struct EulerianRun {
    pub table: Table,
    /// Pulse schedule for the first repetition count.
    pub schedule: String,
}

/// Eulerian-cycle homogenization: deviation from `e^{-t λ J}` as the number of
/// cycle repetitions grows, and the residual of the first-order generator.
pub fn eulerian(cfg: &ExperimentConfig) -> Result<EulerianRun> {
    let n = cfg.n;
    let scheme = homogenization_scheme(n)?;
    let a = random_symmetric(2 * n, cfg.k, derive_seed(cfg.seed, MODEL_STREAM));
    let spec = GroupSpec::Homogenization { n, basis: Basis::Block };
    let target = target_evolution(&a, &spec, cfg.t)?.into_matrix();
    let a_norm = a.norm();
    let mut table = Table::new(cfg, &EULERIAN_COLUMNS);
    table.metadata.push(format!("cycle_length = {}", scheme.cycle().len()));
    table.metadata.push(format!("generators = {}", scheme.graph().generators().len()));
    table.metadata.push(format!("lambda_expected = {}", num(orthogonal_path_rate(&a))));
    for &reps in &cfg.repetitions {
        let tau = scheme.segment_time(cfg.t, reps);
        let evolved = scheme.evolution(&a, cfg.t, reps, cfg.substeps)?;
        let generator = scheme.first_order_generator(&a, tau, cfg.substeps)?;
        let (lambda, residual) = project_onto_j(&generator, Basis::Block);
        table.rows.push(vec![
            reps.to_string(),
            num(tau),
            num(gate_error(&target, evolved.matrix())?),
            num(if a_norm > 0.0 { residual / a_norm } else { residual }),
            num(lambda),
        ]);
    }
    let mut schedule = Vec::new();
    scheme.write_pulse_schedule(scheme.segment_time(cfg.t, cfg.repetitions[0]), &mut schedule)?;
    let schedule = String::from_utf8(schedule).map_err(|e| CliError::Format(e.to_string()))?;
    Ok(EulerianRun { table, schedule })
}

/// Named single- and two-mode models used by the Fock-space comparison.
pub fn fock_models() -> Result<Vec<(&'static str, QuadraticModel, Vec<usize>)>> {
    let harmonic = QuadraticModel::new(Matrix::identity(2, 2), Basis::Block)?;
    let squeeze = QuadraticModel::new(Matrix::from_diagonal(&nalgebra::dvector![1.05, 0.95]), Basis::Block)?;
    Ok(vec![
        ("harmonic", harmonic, vec![10, 20, 40]),
        ("weak-squeeze", squeeze, vec![10, 20, 40]),
        ("beamsplitter", beamsplitter(0.5)?, vec![8, 12, 16]),
    ])
}

/// Truncated Fock-space evolution against the symplectic prediction.
pub fn fock_check(cfg: &ExperimentConfig) -> Result<Table> {
    let mut table = Table::new(cfg, &FOCK_COLUMNS);
    for (name, model, cutoffs) in fock_models()? {
        for cutoff in cutoffs {
            let report = heisenberg_check(&model, cfg.t, cutoff)?;
            table.rows.push(vec![
                name.to_string(),
                cutoff.to_string(),
                num(cfg.t),
                num(report.defect),
                num(report.unitarity_defect),
            ]);
        }
    }
    Ok(table)
}
