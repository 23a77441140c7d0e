//! Dense real-matrix kernel for the phase-space picture.
//!
//! A quadratic Hamiltonian `H = ½ Σ A_ij R_i R_j` on `n` modes is represented by
//! the real symmetric `2n × 2n` matrix `A`. Its Gaussian evolution acts on the
//! quadrature vector through the symplectic matrix `S(t) = exp(-t A J)`, where `J`
//! is the symplectic form of the chosen quadrature ordering.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Ordering of the quadrature vector `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Basis {
    /// `(x_1, ..., x_n, p_1, ..., p_n)`, with `J = [[0, 1], [-1, 0]] ⊗ 1_n`.
    #[default]
    Block,
    /// `(x_1, p_1, ..., x_n, p_n)`, with `J = ⊕ [[0, 1], [-1, 0]]`.
    Interleaved,
}

/// Asymmetry below this is treated as rounding noise and symmetrized away.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    basis: Basis,
    matrix: Matrix,
}

impl SymplecticForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

/// Builds the symplectic form `J` for `n` modes in the given basis.
pub fn symplectic_form(n: usize, basis: Basis) -> Result<SymplecticForm> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be at least 1".into()));
    }
    let dim = 2 * n;
    let mut j = Matrix::zeros(dim, dim);
    match basis {
        Basis::Block => {
            for i in 0..n {
                j[(i, n + i)] = 1.0;
                j[(n + i, i)] = -1.0;
            }
        }
        Basis::Interleaved => {
            for i in 0..n {
                j[(2 * i, 2 * i + 1)] = 1.0;
                j[(2 * i + 1, 2 * i)] = -1.0;
            }
        }
    }
    Ok(SymplecticForm { n, basis, matrix: j })
}

/// Shorthand for the matrix of [`symplectic_form`] when `n` is known to be valid.
pub(crate) fn j_matrix(n: usize, basis: Basis) -> Matrix {
    symplectic_form(n, basis).expect("n >= 1").into_matrix()
}

/// Index permutation between the block and interleaved orderings.
///
/// `source(i)` is the block-basis index that lands at interleaved position `i`, so
/// that `P · diag(x_1..x_n, p_1..p_n) · Pᵀ = diag(x_1, p_1, ..., x_n, p_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisPermutation {
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl BasisPermutation {
    pub fn n(&self) -> usize {
        self.perm.len() / 2
    }

    /// Block index placed at interleaved position `i`.
    pub fn source(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// Interleaved position of block index `b`.
    pub fn target(&self, b: usize) -> usize {
        self.inverse[b]
    }

    pub fn indices(&self) -> &[usize] {
        &self.perm
    }

    /// The permutation matrix `P` with `P v_block = v_interleaved`.
    pub fn matrix(&self) -> Matrix {
        let d = self.perm.len();
        let mut p = Matrix::zeros(d, d);
        for (i, &src) in self.perm.iter().enumerate() {
            p[(i, src)] = 1.0;
        }
        p
    }

    /// `P M Pᵀ`: re-expresses a block-basis matrix in the interleaved basis.
    pub fn to_interleaved(&self, m: &Matrix) -> Matrix {
        let d = self.perm.len();
        Matrix::from_fn(d, d, |i, j| m[(self.perm[i], self.perm[j])])
    }

    /// `Pᵀ M P`: re-expresses an interleaved-basis matrix in the block basis.
    pub fn to_block(&self, m: &Matrix) -> Matrix {
        let d = self.perm.len();
        Matrix::from_fn(d, d, |i, j| m[(self.inverse[i], self.inverse[j])])
    }

    /// Converts `m` from basis `from` to basis `to`.
    pub fn convert(&self, m: &Matrix, from: Basis, to: Basis) -> Matrix {
        match (from, to) {
            (Basis::Block, Basis::Interleaved) => self.to_interleaved(m),
            (Basis::Interleaved, Basis::Block) => self.to_block(m),
            _ => m.clone(),
        }
    }
}

pub fn basis_conversion(n: usize) -> Result<BasisPermutation> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be at least 1".into()));
    }
    let perm: Vec<usize> = (0..n).flat_map(|j| [j, n + j]).collect();
    let mut inverse = vec![0; 2 * n];
    for (i, &src) in perm.iter().enumerate() {
        inverse[src] = i;
    }
    Ok(BasisPermutation { perm, inverse })
}

// Padé approximant degrees with the 1-norm bounds below which each reaches unit
// roundoff in double precision (Higham 2005). Degree 13 is used after scaling.
const PADE_DEGREES: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

/// Coefficients of the diagonal `[m/m]` Padé numerator of `exp`, normalized so the
/// constant term is 1: `c_{i+1} = c_i (m - i) / ((i + 1)(2m - i))`.
fn pade_coefficients(m: usize) -> Vec<f64> {
    let mut c = vec![1.0; m + 1];
    for i in 0..m {
        c[i + 1] = c[i] * (m - i) as f64 / ((i + 1) as f64 * (2 * m - i) as f64);
    }
    c
}

fn norm1(m: &Matrix) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with diagonal Padé approximants.
pub fn expm_real(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("expm needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix exponential argument"));
    }
    let d = m.nrows();
    if d == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let eta = norm1(m);
    for &(degree, theta) in &PADE_DEGREES {
        if eta <= theta {
            return pade_low(m, degree);
        }
    }

    let s = if eta > THETA_13 { (eta / THETA_13).log2().ceil().max(0.0) as i32 } else { 0 };
    let a = m * 2f64.powi(-s);
    let mut r = pade13(&a)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_solve(u: Matrix, v: Matrix) -> Result<Matrix> {
    let p = &v + &u;
    let q = &v - &u;
    q.lu().solve(&p).ok_or_else(|| Error::InvalidParameter("singular Padé denominator".into()))
}

fn pade_low(a: &Matrix, degree: usize) -> Result<Matrix> {
    let d = a.nrows();
    let c = pade_coefficients(degree);
    let a2 = a * a;
    // Even powers 1, A², A⁴, ... up to A^{degree-1}.
    let mut powers = vec![Matrix::identity(d, d), a2.clone()];
    while powers.len() <= degree / 2 {
        let next = powers.last().expect("non-empty") * &a2;
        powers.push(next);
    }
    let mut u_inner = Matrix::zeros(d, d);
    let mut v = Matrix::zeros(d, d);
    for (k, p) in powers.iter().enumerate() {
        if 2 * k < degree {
            u_inner += p * c[2 * k + 1];
        }
        v += p * c[2 * k];
    }
    pade_solve(a * u_inner, v)
}

fn pade13(a: &Matrix) -> Result<Matrix> {
    let d = a.nrows();
    let b = pade_coefficients(13);
    let ident = Matrix::identity(d, d);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_high = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u_inner = u_high + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1];
    let u = a * u_inner;

    let v_high = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = v_high + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];
    pade_solve(u, v)
}

/// Squared Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm_sq(m: &Matrix) -> f64 {
    m.iter().map(|x| x * x).sum()
}

/// Operator norm: the largest singular value.
pub fn op_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub(crate) fn max_asymmetry(m: &Matrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Rejects asymmetric input, returning the exactly symmetrized matrix otherwise.
pub(crate) fn checked_symmetric(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("expected a square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("Hamiltonian matrix"));
    }
    let asym = max_asymmetry(a);
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric(asym));
    }
    if asym == 0.0 {
        Ok(a.clone())
    } else {
        Ok((a + a.transpose()) * 0.5)
    }
}

/// A quadratic Hamiltonian on `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel {
    n: usize,
    a: Matrix,
    basis: Basis,
}

impl QuadraticModel {
    pub fn new(a: Matrix, basis: Basis) -> Result<Self> {
        if a.nrows() == 0 || !a.nrows().is_multiple_of(2) {
            return Err(Error::InvalidDimension(format!(
                "Hamiltonian matrix must be 2n x 2n with n >= 1, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let a = checked_symmetric(&a)?;
        Ok(Self { n: a.nrows() / 2, a, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn form(&self) -> SymplecticForm {
        symplectic_form(self.n, self.basis).expect("n >= 1")
    }

    /// The same Hamiltonian expressed in another quadrature ordering.
    pub fn to_basis(&self, basis: Basis) -> Self {
        let perm = basis_conversion(self.n).expect("n >= 1");
        Self { n: self.n, a: perm.convert(&self.a, self.basis, basis), basis }
    }

    /// `S(t) = exp(-t A J)`.
    pub fn evolve(&self, t: f64) -> Result<SymplecticMatrix> {
        evolve_with_form(self, &self.form(), t)
    }
}

/// [`QuadraticModel::evolve`] with an explicitly supplied symplectic form.
pub fn evolve_with_form(model: &QuadraticModel, form: &SymplecticForm, t: f64) -> Result<SymplecticMatrix> {
    if form.basis() != model.basis() {
        return Err(Error::BasisMismatch { model: model.basis(), form: form.basis() });
    }
    if form.n() != model.n() {
        return Err(Error::DimensionMismatch(format!(
            "model has {} modes, symplectic form has {}",
            model.n(),
            form.n()
        )));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time"));
    }
    let generator = model.matrix() * form.matrix() * (-t);
    SymplecticMatrix::new(expm_real(&generator)?, model.basis())
}

/// A real `2n × 2n` matrix that preserves `J` up to [`symplectic_tolerance`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    matrix: Matrix,
    n: usize,
    basis: Basis,
}

/// `‖S J Sᵀ − J‖_∞` with `‖·‖_∞` the operator norm.
pub fn symplectic_defect(s: &Matrix, j: &Matrix) -> f64 {
    op_norm(&(s * j * s.transpose() - j))
}

/// Admissible symplecticity defect; conditioning of `S J Sᵀ` grows with `‖S‖²`.
pub fn symplectic_tolerance(s: &Matrix) -> f64 {
    let norm = op_norm(s);
    1e-9 * (norm * norm).max(1.0)
}

impl SymplecticMatrix {
    /// Wraps `matrix`, verifying symplecticity against `J` of the given basis.
    pub fn new(matrix: Matrix, basis: Basis) -> Result<Self> {
        if matrix.nrows() == 0 || !matrix.nrows().is_multiple_of(2) || !matrix.is_square() {
            return Err(Error::InvalidDimension(format!(
                "symplectic matrix must be 2n x 2n, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = matrix.nrows() / 2;
        let j = j_matrix(n, basis);
        let defect = symplectic_defect(&matrix, &j);
        let tolerance = symplectic_tolerance(&matrix);
        if defect.is_nan() || defect > tolerance {
            return Err(Error::NotSymplectic { defect, tolerance });
        }
        Ok(Self { matrix, n, basis })
    }

    pub fn identity(n: usize, basis: Basis) -> Self {
        Self { matrix: Matrix::identity(2 * n, 2 * n), n, basis }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn defect(&self) -> f64 {
        symplectic_defect(&self.matrix, &j_matrix(self.n, self.basis))
    }

    /// `S⁻¹ = J Sᵀ J⁻¹ = -J Sᵀ J`.
    pub fn inverse(&self) -> Self {
        Self { matrix: symplectic_inverse(&self.matrix, &j_matrix(self.n, self.basis)), n: self.n, basis: self.basis }
    }
}

pub(crate) fn symplectic_inverse(s: &Matrix, j: &Matrix) -> Matrix {
    -(j * s.transpose() * j)
}
