//! Gate error of the random decoupling walk: Monte Carlo estimates, the first-order
//! formula, rigorous upper bounds and exact expectations from moment generators.

use rayon::prelude::*;

use crate::averaging::{averaged_generator, PartitionedModel};
use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::schemes::{target_evolution, RandomWalk};
use crate::seeding::derive_seed;
use crate::symplectic::{expm_real, hs_norm_sq, j_matrix, op_norm, Matrix, QuadraticModel};

/// Largest `(2n)²` for which the second-moment generator is built densely.
pub const MAX_GENERATOR_SIZE: usize = 4096;

/// Largest `(2n)²` for the exact discrete-walk moment matrices.
pub const MAX_WALK_MOMENT_SIZE: usize = 1024;

/// Relative tolerance on `t/τ` being an integer before a rounding warning is issued.
pub const STEP_ROUNDING_TOLERANCE: f64 = 1e-9;

/// `ε = ‖S₀ - S‖₂²` (squared Hilbert–Schmidt norm).
pub fn gate_error(s0: &Matrix, s: &Matrix) -> Result<f64> {
    if s0.shape() != s.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", s0.shape(), s.shape())));
    }
    Ok(hs_norm_sq(&(s0 - s)))
}

/// What is being decoupled: a homogenized model or a system–environment model.
#[derive(Debug, Clone)]
pub enum Scenario {
    Homogenization(QuadraticModel),
    Suppression(PartitionedModel),
}

impl Scenario {
    pub fn spec(&self) -> GroupSpec {
        match self {
            Scenario::Homogenization(m) => GroupSpec::Homogenization { n: m.n(), basis: m.basis() },
            Scenario::Suppression(pm) => pm.group_spec(),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        match self {
            Scenario::Homogenization(m) => m.matrix(),
            Scenario::Suppression(pm) => pm.matrix(),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix().nrows() / 2
    }

    /// `Π(A)` or `Π̃(A)`.
    pub fn averaged(&self) -> Result<Matrix> {
        averaged_generator(&self.spec(), self.matrix())
    }

    /// `‖A - Π(A)‖₂²` or `‖A - Π̃(A)‖₂²`.
    pub fn deviation_norm_sq(&self) -> Result<f64> {
        Ok(hs_norm_sq(&(self.matrix() - self.averaged()?)))
    }

    /// The upper bound for this model, using the operator norm of `A` or the
    /// realized coupling scale `k`.
    pub fn upper_bound(&self, tau: f64, t: f64) -> f64 {
        match self {
            Scenario::Homogenization(m) => {
                upper_bound(BoundParams::Homogenization { n: m.n(), a_norm: op_norm(m.matrix()) }, tau, t)
            }
            Scenario::Suppression(pm) => {
                upper_bound(BoundParams::Suppression { n_s: pm.n_s(), n_e: pm.n_e(), k: pm.k() }, tau, t)
            }
        }
    }
}

/// Sample mean and standard error of the gate error over independent trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub tau: f64,
    /// Realized total time `ℓτ`.
    pub t: f64,
    pub steps: usize,
    /// Requested time, when `t/τ` had to be rounded to an integer step count.
    pub requested_t: Option<f64>,
}

impl ErrorEstimate {
    pub fn rounding_warning(&self) -> Option<String> {
        self.requested_t.map(|req| {
            format!("t/tau = {} is not an integer; ran {} steps (t = {})", req / self.tau, self.steps, self.t)
        })
    }
}

/// `ℓ = round(t/τ)` and whether rounding changed the time.
pub fn step_count(tau: f64, t: f64) -> Result<(usize, bool)> {
    if !(tau.is_finite() && tau > 0.0 && t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(format!("need tau > 0 and t > 0, got tau={tau}, t={t}")));
    }
    let ratio = t / tau;
    let steps = ratio.round();
    if steps < 1.0 {
        return Err(Error::InvalidParameter(format!("t/tau = {ratio} rounds to zero steps")));
    }
    Ok((steps as usize, (ratio - steps).abs() > STEP_ROUNDING_TOLERANCE * ratio))
}

/// Mean gate error of `trials` seeded walks against the target evolution.
///
/// Trial `i` uses seed `derive_seed(master_seed, i)` and the sum runs in trial order,
/// so the result does not depend on the thread pool.
pub fn monte_carlo_expected_error(
    scenario: &Scenario,
    tau: f64,
    t: f64,
    trials: usize,
    master_seed: u64,
) -> Result<ErrorEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let (steps, rounded) = step_count(tau, t)?;
    let realized_t = steps as f64 * tau;
    let spec = scenario.spec();
    let target = target_evolution(scenario.matrix(), &spec, realized_t)?.into_matrix();
    let walk = RandomWalk::new(scenario.matrix(), spec, tau)?;
    let errors: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| hs_norm_sq(&(&target - walk.trajectory(steps, derive_seed(master_seed, i)))))
        .collect();
    let mean = errors.iter().sum::<f64>() / trials as f64;
    let std_error = if trials > 1 {
        let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(ErrorEstimate { mean, std_error, trials, tau, t: realized_t, steps, requested_t: rounded.then_some(t) })
}

/// `2τt ‖A - Π(A)‖₂²` (or with `Π̃`).
pub fn analytic_approximation(scenario: &Scenario, tau: f64, t: f64) -> Result<f64> {
    Ok(2.0 * tau * t * scenario.deviation_norm_sq()?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundParams {
    /// `a_norm` is the operator norm `‖A‖_∞`.
    Homogenization { n: usize, a_norm: f64 },
    /// `k` bounds the absolute entries of the coupling block.
    Suppression { n_s: usize, n_e: usize, k: f64 },
}

/// `16τt n ‖A‖_∞²` or `16τt n_s n_e k²`.
pub fn upper_bound(params: BoundParams, tau: f64, t: f64) -> f64 {
    match params {
        BoundParams::Homogenization { n, a_norm } => 16.0 * tau * t * n as f64 * a_norm * a_norm,
        BoundParams::Suppression { n_s, n_e, k } => 16.0 * tau * t * (n_s * n_e) as f64 * k * k,
    }
}

/// First- and second-moment generators of the diffusion limit:
///
/// `L̂ = -Π(A)J + (τ/|G|) Σ_g B_g²` and
/// `L̂⁽²⁾ = -C⊗1 - 1⊗C + (τ/|G|) Σ_g (B_g²⊗1 + 1⊗B_g² + 2 B_g⊗B_g)`,
/// with `B_g = g (A - Π(A)) J g⁻¹` and `C = Π(A)J`, so that
/// `E[S] = e^{tL̂}` and `E[S⊗S] = e^{tL̂⁽²⁾}`.
#[derive(Debug, Clone)]
pub struct GeneratorPair {
    lhat: Matrix,
    lhat2: Matrix,
    drift: Matrix,
}

impl GeneratorPair {
    /// Generators with diffusion strength `τ`.
    pub fn new(scenario: &Scenario, tau: f64) -> Result<Self> {
        Self::build(scenario, tau, false)
    }

    /// Generators whose diffusion matches the second-order expansion of the
    /// discrete walk, `e^{-τX} ≈ 1 - τX + τ²X²/2`: strength `τ/2`.
    pub fn walk_matched(scenario: &Scenario, tau: f64) -> Result<Self> {
        Self::build(scenario, tau / 2.0, false)
    }

    /// `L̂⁽²⁾` exactly as typeset, with transposes on the right tensor factor.
    pub fn transposed_display(scenario: &Scenario, tau: f64) -> Result<Self> {
        Self::build(scenario, tau, true)
    }

    fn build(scenario: &Scenario, strength: f64, transpose_right: bool) -> Result<Self> {
        let spec = scenario.spec();
        let d = spec.dim();
        if d * d > MAX_GENERATOR_SIZE {
            return Err(Error::GeneratorTooLarge { size: d * d, limit: MAX_GENERATOR_SIZE });
        }
        let group = spec.enumerate()?;
        let j = j_matrix(spec.n(), spec.basis());
        let averaged = scenario.averaged()?;
        let drift = &averaged * &j;
        let fluctuation = (scenario.matrix() - &averaged) * &j;
        let id = Matrix::identity(d, d);
        let right = |m: &Matrix| if transpose_right { m.transpose() } else { m.clone() };

        let mut diffusion1 = Matrix::zeros(d, d);
        let mut diffusion2 = Matrix::zeros(d * d, d * d);
        for g in &group {
            let b = g.conjugate(&fluctuation);
            let b2 = &b * &b;
            let b_right = right(&b);
            diffusion2 += b2.kronecker(&id) + id.kronecker(&(&b_right * &b_right)) + b.kronecker(&b_right) * 2.0;
            diffusion1 += b2;
        }
        let weight = strength / group.len() as f64;
        let lhat = -&drift + diffusion1 * weight;
        let lhat2 = -drift.kronecker(&id) - id.kronecker(&right(&drift)) + diffusion2 * weight;
        Ok(Self { lhat, lhat2, drift })
    }

    pub fn lhat(&self) -> &Matrix {
        &self.lhat
    }

    pub fn lhat2(&self) -> &Matrix {
        &self.lhat2
    }

    /// `Π(A)J` (or `Π̃(A)J`).
    pub fn drift(&self) -> &Matrix {
        &self.drift
    }
}

/// `E‖S₀ - S‖₂² = Σ_kl E[S_kl²] + ‖S₀‖₂² - 2 Σ_kl E[S_kl] (S₀)_kl` from moments.
fn error_from_moments(first: &Matrix, second: &Matrix, target: &Matrix) -> f64 {
    let d = first.nrows();
    let mut second_sum = 0.0;
    for k in 0..d {
        for l in 0..d {
            second_sum += second[(k * d + k, l * d + l)];
        }
    }
    second_sum + hs_norm_sq(target) - 2.0 * first.dot(target)
}

/// `E[ε(t)]` for the diffusion-limit process, from `e^{tL̂}` and `e^{tL̂⁽²⁾}`.
///
/// For homogenization `‖S₀‖₂² = 2n`; for suppression `S₀` is not orthogonal and its
/// actual norm is used.
pub fn exact_expected_error(scenario: &Scenario, tau: f64, t: f64) -> Result<f64> {
    expected_error_with(&GeneratorPair::new(scenario, tau)?, scenario, t)
}

/// Same as [`exact_expected_error`] with the walk-matched diffusion strength `τ/2`.
pub fn walk_matched_expected_error(scenario: &Scenario, tau: f64, t: f64) -> Result<f64> {
    expected_error_with(&GeneratorPair::walk_matched(scenario, tau)?, scenario, t)
}

/// `E[ε(t)]` from an explicit generator pair.
pub fn expected_error_with(pair: &GeneratorPair, scenario: &Scenario, t: f64) -> Result<f64> {
    let first = expm_real(&(pair.lhat() * t))?;
    let second = expm_real(&(pair.lhat2() * t))?;
    let target = target_evolution(scenario.matrix(), &scenario.spec(), t)?.into_matrix();
    Ok(error_from_moments(&first, &second, &target))
}

/// The expected-error display read literally: transposed right tensor factor,
/// contraction `⟨e_k⊗e_l, e^{tL̂⁽²⁾} e_l⊗e_k⟩`, constant `2n` and `S₀(-t)` in the
/// first cross term.
///
/// Kept as a diagnostic: it does not reduce to the first-order formula as `τ → 0`.
pub fn literal_display_expected_error(scenario: &Scenario, tau: f64, t: f64) -> Result<f64> {
    let pair = GeneratorPair::transposed_display(scenario, tau)?;
    let first = expm_real(&(pair.lhat() * t))?;
    let second = expm_real(&(pair.lhat2() * t))?;
    let spec = scenario.spec();
    let s0 = target_evolution(scenario.matrix(), &spec, t)?.into_matrix();
    let s0_back = expm_real(&(pair.drift() * t))?;
    let d = first.nrows();
    let mut total = d as f64;
    for k in 0..d {
        for l in 0..d {
            total += second[(k * d + l, l * d + k)];
            total -= first[(k, l)] * s0_back[(l, k)];
            total -= first[(k, l)] * s0[(k, l)];
        }
    }
    Ok(total)
}

/// Exact `E[ε(ℓτ)]` of the discrete walk from the one-step moments
/// `M₁ = avg_g K_g` and `M₂ = avg_g K_g⊗K_g`, `K_g = g e^{-τAJ} g⁻¹`.
pub fn walk_expected_error(scenario: &Scenario, tau: f64, t: f64) -> Result<f64> {
    let (steps, _) = step_count(tau, t)?;
    let spec = scenario.spec();
    let d = spec.dim();
    if d * d > MAX_WALK_MOMENT_SIZE {
        return Err(Error::GeneratorTooLarge { size: d * d, limit: MAX_WALK_MOMENT_SIZE });
    }
    let group = spec.enumerate()?;
    let kernel = expm_real(&(scenario.matrix() * j_matrix(spec.n(), spec.basis()) * -tau))?;
    let mut m1 = Matrix::zeros(d, d);
    let mut m2 = Matrix::zeros(d * d, d * d);
    for g in &group {
        let k = g.conjugate(&kernel);
        m2 += k.kronecker(&k);
        m1 += k;
    }
    m1 /= group.len() as f64;
    m2 /= group.len() as f64;
    let target = target_evolution(scenario.matrix(), &spec, steps as f64 * tau)?.into_matrix();
    Ok(error_from_moments(&power(&m1, steps), &power(&m2, steps), &target))
}

fn power(m: &Matrix, mut exponent: usize) -> Matrix {
    let mut result = Matrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = &result * &base;
        }
        exponent >>= 1;
        if exponent > 0 {
            base = &base * &base;
        }
    }
    result
}
