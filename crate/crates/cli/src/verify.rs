//! The invariant suite behind `sympdd verify`.

use std::fmt;

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use sympdd_core::averaging::{
    pi0_map, pi_map_closed_form, pi_map_enumerated, tilde_pi, tilde_pi_by_averaging, PartitionedModel,
};
use sympdd_core::error_analysis::{
    exact_expected_error, monte_carlo_expected_error, walk_matched_expected_error, Scenario,
};
use sympdd_core::eulerian::{orthogonal_path_rate, project_onto_j, DEFAULT_SUBSTEPS};
use sympdd_core::fock::{beamsplitter, heisenberg_check};
use sympdd_core::groups::{enumerate_unitary_decoupling_set, GroupSpec};
use sympdd_core::schemes::{deterministic_cycle, target_evolution};
use sympdd_core::seeding::{derive_seed, rng_from_seed, SimRng};
use sympdd_core::symplectic::{max_abs, op_norm};
use sympdd_core::{Basis, Matrix, QuadraticModel};

use crate::config::{ExperimentConfig, Fault};
use crate::error::{CliError, Result};
use crate::experiments::{homogenization_scheme, random_symmetric};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub max_defect: f64,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<24} checks={:<5} max_defect={:<10.3e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.checks,
            self.max_defect,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub items: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failed(&self) -> usize {
        self.items.iter().filter(|c| !c.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(CliError::VerificationFailed { failed: self.failed(), total: self.items.len() })
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(f, "{item}")?;
        }
        write!(f, "summary: {}/{} passed", self.items.len() - self.failed(), self.items.len())
    }
}

struct Tally {
    checks: usize,
    max_defect: f64,
}

impl Tally {
    fn new() -> Self {
        Self { checks: 0, max_defect: 0.0 }
    }

    fn record(&mut self, defect: f64) {
        self.checks += 1;
        self.max_defect = self.max_defect.max(defect);
    }

    fn finish(self, name: &'static str, tolerance: f64, detail: String) -> CheckResult {
        CheckResult {
            name,
            passed: self.max_defect <= tolerance,
            checks: self.checks,
            max_defect: self.max_defect,
            detail: format!("tol={tolerance:e} {detail}").trim_end().to_string(),
        }
    }
}

fn rng(cfg: &ExperimentConfig, stream: u64) -> SimRng {
    rng_from_seed(derive_seed(cfg.seed, stream))
}

fn model_matrix(cfg: &ExperimentConfig, dim: usize, stream: u64) -> Matrix {
    let mut a = random_symmetric(dim, 1.0, derive_seed(cfg.seed, stream));
    if cfg.fault == Some(Fault::Asymmetric) {
        a[(0, dim - 1)] += 0.5;
    }
    a
}

fn model_construction(cfg: &ExperimentConfig) -> Result<CheckResult> {
    let mut tally = Tally::new();
    for n in 1..=4 {
        QuadraticModel::new(model_matrix(cfg, 2 * n, 100 + n as u64), Basis::Block)?;
        tally.record(0.0);
    }
    Ok(tally.finish("model-construction", 0.0, String::new()))
}

fn decoupling_set(cfg: &ExperimentConfig) -> Result<CheckResult> {
    let mut tally = Tally::new();
    let mut r = rng(cfg, 1);
    for n in 1..=3 {
        let set = enumerate_unitary_decoupling_set(n)?;
        for _ in 0..5 {
            let x = DMatrix::from_fn(n, n, |_, _| Complex::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5));
            let expected = DMatrix::identity(n, n) * (x.trace() / Complex::new(n as f64, 0.0));
            let diff = pi0_map(&x, &set)? - expected;
            tally.record(diff.iter().fold(0.0f64, |m, z| m.max(z.norm())));
        }
    }
    Ok(tally.finish("decoupling-set", 1e-12, "n=1..3".into()))
}

fn homogenization_average(cfg: &ExperimentConfig) -> Result<CheckResult> {
    let mut tally = Tally::new();
    for n in 1..=6 {
        let a = model_matrix(cfg, 2 * n, 200 + n as u64);
        for basis in [Basis::Block, Basis::Interleaved] {
            tally.record(max_abs(&(pi_map_enumerated(&a, basis)? - pi_map_closed_form(&a)?)));
        }
    }
    Ok(tally.finish("homogenization-average", 1e-12, "n=1..6".into()))
}

fn suppression_exactness(cfg: &ExperimentConfig) -> Result<CheckResult> {
    let mut tally = Tally::new();
    for (i, (n_s, n_e)) in [(1, 0), (1, 3), (2, 5), (2, 20)].into_iter().enumerate() {
        let pm = PartitionedModel::new(model_matrix(cfg, 2 * (n_s + n_e), 300 + i as u64), n_s, n_e)?;
        let by_average = tilde_pi_by_averaging(&pm)?;
        let exact = tilde_pi(&pm);
        let mismatches = by_average.iter().zip(exact.iter()).filter(|(a, b)| a.to_bits() != b.to_bits()).count();
        tally.record(mismatches as f64);
    }
    Ok(tally.finish("suppression-exactness", 0.0, "bitwise".into()))
}

fn trotter_convergence(cfg: &ExperimentConfig) -> Result<CheckResult> {
    let a = model_matrix(cfg, 2, 400);
    let spec = GroupSpec::Homogenization { n: 1, basis: Basis::Block };
    let group = spec.enumerate()?;
    let target = target_evolution(&a, &spec, 1.0)?;
    let dev = |reps| -> Result<f64> {
        Ok(op_norm(&(deterministic_cycle(&a, &group, &spec, 1.0, reps)?.into_matrix() - target.matrix())))
    };
    let devs = [dev(8)?, dev(16)?, dev(32)?, dev(64)?];
    let mut tally = Tally::new();
    for w in devs.windows(2) {
        tally.record((w[0] / w[1] - 2.0).abs() / 2.0);
    }
    Ok(tally.finish("trotter-convergence", 0.2, format!("deviation(N=64)={:.3e}", devs[3])))
}

fn eulerian_first_order(cfg: &ExperimentConfig) -> Result<CheckResult> {
    let mut tally = Tally::new();
    for n in 1..=2 {
        let scheme = homogenization_scheme(n)?;
        let a = model_matrix(cfg, 2 * n, 500 + n as u64);
        let generator = scheme.first_order_generator(&a, 1e-2, DEFAULT_SUBSTEPS)?;
        let (lambda, residual) = project_onto_j(&generator, Basis::Block);
        tally.record(residual / a.norm());
        tally.record((lambda - orthogonal_path_rate(&a)).abs() / a.norm());
    }
    Ok(tally.finish("eulerian-first-order", 1e-3, "relative to |A|".into()))
}

fn generator_vs_mc(cfg: &ExperimentConfig) -> Result<CheckResult> {
    let (tau, t) = (1e-2, 1.0);
    let mut tally = Tally::new();
    let mut unhalved_ratio = 0.0;
    for n in 1..=2 {
        let scenario =
            Scenario::Homogenization(QuadraticModel::new(model_matrix(cfg, 2 * n, 600 + n as u64), Basis::Block)?);
        let est =
            monte_carlo_expected_error(&scenario, tau, t, cfg.trials.max(2000), derive_seed(cfg.seed, 610 + n as u64))?;
        let predicted = walk_matched_expected_error(&scenario, tau, t)?;
        tally.record((est.mean - predicted).abs() / est.std_error);
        unhalved_ratio = exact_expected_error(&scenario, tau, t)? / est.mean;
    }
    Ok(tally.finish(
        "generator-vs-mc",
        3.0,
        format!("defect in standard errors; unhalved generator/MC = {unhalved_ratio:.2}"),
    ))
}

fn fock_oracle(_cfg: &ExperimentConfig) -> Result<CheckResult> {
    let mut tally = Tally::new();
    let harmonic = QuadraticModel::new(Matrix::identity(2, 2), Basis::Block)?;
    let mut previous = f64::INFINITY;
    let mut monotone = true;
    for d in [10, 20, 40] {
        let report = heisenberg_check(&harmonic, std::f64::consts::PI, d)?;
        monotone &= report.defect <= previous.max(1e-12);
        previous = report.defect;
        tally.record(report.defect / 1e-8);
    }
    tally.record(heisenberg_check(&beamsplitter(1.0)?, 1.0, 12)?.defect / 1e-6);
    let mut result = tally.finish("fock-oracle", 1.0, "defect / tolerance".into());
    result.passed &= monotone;
    Ok(result)
}

type Check = fn(&ExperimentConfig) -> Result<CheckResult>;

const CHECKS: [(&str, Check); 8] = [
    ("model-construction", model_construction),
    ("decoupling-set", decoupling_set),
    ("homogenization-average", homogenization_average),
    ("suppression-exactness", suppression_exactness),
    ("trotter-convergence", trotter_convergence),
    ("eulerian-first-order", eulerian_first_order),
    ("generator-vs-mc", generator_vs_mc),
    ("fock-oracle", fock_oracle),
];

/// Runs every check; a check that errors is reported as failed with the error text.
pub fn run_verify(cfg: &ExperimentConfig) -> VerifyReport {
    let items = CHECKS
        .iter()
        .map(|(name, check)| {
            check(cfg).unwrap_or_else(|e| CheckResult {
                name,
                passed: false,
                checks: 0,
                max_defect: f64::NAN,
                detail: format!("error: {e}"),
            })
        })
        .collect();
    VerifyReport { items }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ConfigOverrides, Mode};

    #[test]
    fn clean_run_passes() {
        let cfg = ConfigOverrides::default().resolve(Mode::Verify).unwrap();
        let report = run_verify(&cfg);
        assert!(report.passed(), "{report}");
        assert!(report.items.iter().all(|c| c.checks > 0));
        let text = report.to_string();
        assert!(text.contains("[PASS] fock-oracle"));
        assert!(text.ends_with("summary: 8/8 passed"));
    }

    #[test]
    fn asymmetric_fault_is_reported() {
        let cfg =
            ConfigOverrides { fault: Some(Fault::Asymmetric), ..Default::default() }.resolve(Mode::Verify).unwrap();
        let report = run_verify(&cfg);
        let construction = &report.items[0];
        assert!(!construction.passed);
        assert!(construction.detail.contains("symmetric"), "{}", construction.detail);
        assert!(matches!(report.into_result(), Err(CliError::VerificationFailed { .. })));
    }
}
