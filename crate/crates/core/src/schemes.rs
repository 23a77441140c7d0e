//! Time evolution under decoupling: the ideal target, deterministic cycles with
//! Trotter repetition, and the random decoupling walk.
//!
//! Products are ordered with the earliest factor rightmost, so a state vector is
//! acted on by the first step first.

use rand::Rng;

use crate::averaging::averaged_generator;
use crate::error::{Error, Result};
use crate::groups::{GroupSpec, Monomial};
use crate::seeding::{rng_from_seed, SimRng};
use crate::symplectic::{checked_symmetric, expm_real, j_matrix, Matrix, SymplecticMatrix};

/// Groups up to this order have all conjugated kernels precomputed.
const KERNEL_TABLE_LIMIT: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Random,
    DeterministicCycle,
    Eulerian,
}

/// Parameters of a single trajectory: `ℓ` pulses spaced by `τ`, total time `ℓτ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    tau: f64,
    steps: usize,
    seed: u64,
    scheme: SchemeKind,
}

impl TrajectoryConfig {
    pub fn new(tau: f64, steps: usize, seed: u64, scheme: SchemeKind) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter("at least one step is required".into()));
        }
        Ok(Self { tau, steps, seed, scheme })
    }

    pub fn random(tau: f64, steps: usize, seed: u64) -> Result<Self> {
        Self::new(tau, steps, seed, SchemeKind::Random)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn total_time(&self) -> f64 {
        self.tau * self.steps as f64
    }
}

fn check_model(a: &Matrix, spec: &GroupSpec) -> Result<Matrix> {
    if a.nrows() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "group acts on dimension {}, matrix has {}",
            spec.dim(),
            a.nrows()
        )));
    }
    checked_symmetric(a)
}

/// `exp(-t G J)` with `G` the averaged generator of `spec` (`Π(A)`, `Π̃(A)` or `A`).
pub fn target_evolution(a: &Matrix, spec: &GroupSpec, t: f64) -> Result<SymplecticMatrix> {
    let a = check_model(a, spec)?;
    let generator = averaged_generator(spec, &a)?;
    let j = j_matrix(spec.n(), spec.basis());
    SymplecticMatrix::new(expm_real(&(generator * j * -t))?, spec.basis())
}

/// `(∏_k g_k e^{-(t/(|G|N)) A J} g_k⁻¹)^N`, cycling through `group` in order.
pub fn deterministic_cycle(
    a: &Matrix,
    group: &[Monomial],
    spec: &GroupSpec,
    t: f64,
    repetitions: usize,
) -> Result<SymplecticMatrix> {
    let a = check_model(a, spec)?;
    if group.is_empty() || repetitions == 0 {
        return Err(Error::InvalidParameter("need a nonempty group and N ≥ 1".into()));
    }
    let d = a.nrows();
    let step = t / (group.len() * repetitions) as f64;
    let kernel = expm_real(&(&a * j_matrix(spec.n(), spec.basis()) * -step))?;
    let mut cycle = Matrix::identity(d, d);
    let mut conj = Matrix::zeros(d, d);
    let mut next = Matrix::zeros(d, d);
    for g in group {
        g.conjugate_into(&kernel, &mut conj);
        conj.mul_to(&cycle, &mut next);
        std::mem::swap(&mut cycle, &mut next);
    }
    SymplecticMatrix::new(matrix_power(&cycle, repetitions), spec.basis())
}

fn matrix_power(m: &Matrix, mut exponent: usize) -> Matrix {
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

/// The random decoupling walk for a fixed `(A, τ, G)`.
///
/// The single-step kernel `e^{-τAJ}` is computed once; small groups also have all
/// conjugates `g e^{-τAJ} g⁻¹` tabulated, larger ones are conjugated per step by
/// signed row and column permutation.
#[derive(Debug, Clone)]
pub struct RandomWalk {
    spec: GroupSpec,
    tau: f64,
    kernel: Matrix,
    table: Option<Vec<Matrix>>,
}

impl RandomWalk {
    pub fn new(a: &Matrix, spec: GroupSpec, tau: f64) -> Result<Self> {
        let a = check_model(a, &spec)?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        let kernel = expm_real(&(&a * j_matrix(spec.n(), spec.basis()) * -tau))?;
        let table = match spec.order() {
            Some(order) if order <= KERNEL_TABLE_LIMIT => {
                Some(spec.enumerate()?.iter().map(|g| g.conjugate(&kernel)).collect())
            }
            _ => None,
        };
        Ok(Self { spec, tau, kernel, table })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn kernel(&self) -> &Matrix {
        &self.kernel
    }

    /// `S⁽¹⁾(ℓτ) = ∏_{j=1..ℓ} g_j e^{-τAJ} g_j⁻¹` for a trajectory seeded by `seed`.
    pub fn trajectory(&self, steps: usize, seed: u64) -> Matrix {
        let mut rng = rng_from_seed(seed);
        self.trajectory_with(steps, &mut rng)
    }

    pub fn trajectory_with(&self, steps: usize, rng: &mut SimRng) -> Matrix {
        let d = self.kernel.nrows();
        let mut state = Matrix::identity(d, d);
        let mut next = Matrix::zeros(d, d);
        let mut conj = Matrix::zeros(d, d);
        for _ in 0..steps {
            let step = match &self.table {
                Some(table) => &table[rng.random_range(0..table.len())],
                None => {
                    self.spec.sample(rng).conjugate_into(&self.kernel, &mut conj);
                    &conj
                }
            };
            step.mul_to(&state, &mut next);
            std::mem::swap(&mut state, &mut next);
        }
        state
    }
}

/// One seeded realization of the random decoupling walk.
pub fn random_trajectory(a: &Matrix, spec: &GroupSpec, cfg: &TrajectoryConfig) -> Result<SymplecticMatrix> {
    if cfg.scheme() != SchemeKind::Random {
        return Err(Error::InvalidParameter(format!("{:?} is not a random scheme", cfg.scheme())));
    }
    let walk = RandomWalk::new(a, *spec, cfg.tau())?;
    SymplecticMatrix::new(walk.trajectory(cfg.steps(), cfg.seed()), spec.basis())
}
