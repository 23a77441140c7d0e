//! Truncated Fock-space oracle: builds `H = ½ Σ A_ij R_i R_j` from truncated ladder
//! operators, evolves it exactly by diagonalization, and compares the Heisenberg
//! action on the quadratures with the symplectic matrix `S(t)`.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::symplectic::{basis_conversion, Basis, QuadraticModel};

pub type ComplexMatrix = DMatrix<Complex<f64>>;

/// Largest total Hilbert-space dimension `d^modes`.
pub const MAX_HILBERT_DIM: usize = 4096;

/// Largest number of modes the oracle supports.
pub const MAX_MODES: usize = 2;

/// Smallest cutoff accepted for quadrature construction.
pub const MIN_CUTOFF: usize = 4;

const I: Complex<f64> = Complex::new(0.0, 1.0);

fn real(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

/// Truncated annihilation operator, `a|k⟩ = √k |k-1⟩` for `k < d`.
pub fn annihilation(d: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(d, d);
    for k in 1..d {
        a[(k - 1, k)] = real((k as f64).sqrt());
    }
    a
}

/// Quadratures of `modes` truncated oscillators, `x = (a + a†)/√2`, `p = (a - a†)/(i√2)`.
#[derive(Debug, Clone)]
pub struct TruncatedModes {
    modes: usize,
    cutoff: usize,
    x: Vec<ComplexMatrix>,
    p: Vec<ComplexMatrix>,
}

impl TruncatedModes {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.modes as u32)
    }

    pub fn x(&self, j: usize) -> &ComplexMatrix {
        &self.x[j]
    }

    pub fn p(&self, j: usize) -> &ComplexMatrix {
        &self.p[j]
    }

    /// `R = (x_1, …, x_m, p_1, …, p_m)`, the block ordering.
    pub fn quadrature(&self, index: usize) -> &ComplexMatrix {
        if index < self.modes {
            &self.x[index]
        } else {
            &self.p[index - self.modes]
        }
    }

    /// Basis states whose occupation of every mode is below `levels`.
    pub fn low_lying(&self, levels: usize) -> Vec<usize> {
        let d = self.cutoff;
        (0..self.dim())
            .filter(|&s| {
                let mut rest = s;
                (0..self.modes).all(|_| {
                    let occ = rest % d;
                    rest /= d;
                    occ < levels
                })
            })
            .collect()
    }
}

pub fn build_quadratures(modes: usize, cutoff: usize) -> Result<TruncatedModes> {
    if modes == 0 || modes > MAX_MODES {
        return Err(Error::InvalidDimension(format!("oracle supports 1..={MAX_MODES} modes, got {modes}")));
    }
    if cutoff < MIN_CUTOFF {
        return Err(Error::InvalidParameter(format!("cutoff must be at least {MIN_CUTOFF}, got {cutoff}")));
    }
    let dim = cutoff
        .checked_pow(modes as u32)
        .filter(|&dim| dim <= MAX_HILBERT_DIM)
        .ok_or(Error::HilbertSpaceTooLarge { dim: cutoff.saturating_pow(modes as u32), limit: MAX_HILBERT_DIM })?;
    let a = annihilation(cutoff);
    let id = ComplexMatrix::identity(cutoff, cutoff);
    let scale = real(std::f64::consts::FRAC_1_SQRT_2);
    let mut x = Vec::with_capacity(modes);
    let mut p = Vec::with_capacity(modes);
    for j in 0..modes {
        // Mode 0 is the most significant tensor factor.
        let mut aj = ComplexMatrix::identity(1, 1);
        for m in 0..modes {
            aj = aj.kronecker(if m == j { &a } else { &id });
        }
        debug_assert_eq!(aj.nrows(), dim);
        let adag = aj.adjoint();
        x.push((&aj + &adag) * scale);
        p.push((&aj - &adag) * (scale / I));
    }
    Ok(TruncatedModes { modes, cutoff, x, p })
}

fn submatrix(m: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

fn complex_op_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// `max_ij ‖P([x_i, p_j] - iδ_ij)P‖_∞` with `P` onto occupations below `d - 2`.
pub fn commutator_defect(modes: &TruncatedModes) -> f64 {
    let idx = modes.low_lying(modes.cutoff.saturating_sub(2));
    let id = ComplexMatrix::identity(modes.dim(), modes.dim());
    let mut worst = 0.0f64;
    for i in 0..modes.modes {
        for j in 0..modes.modes {
            let mut c = &modes.x[i] * &modes.p[j] - &modes.p[j] * &modes.x[i];
            if i == j {
                c -= &id * I;
            }
            worst = worst.max(complex_op_norm(&submatrix(&c, &idx)));
        }
    }
    worst
}

/// Truncated `H = ½ Σ A_ij R_i R_j` for a block-basis `A`, Hermitized.
pub fn quadratic_hamiltonian(modes: &TruncatedModes, a_block: &nalgebra::DMatrix<f64>) -> Result<ComplexMatrix> {
    let d = 2 * modes.modes;
    if a_block.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!("{} modes need a {d}×{d} matrix", modes.modes)));
    }
    let mut h = ComplexMatrix::zeros(modes.dim(), modes.dim());
    for i in 0..d {
        for j in 0..d {
            let coeff = a_block[(i, j)];
            if coeff != 0.0 {
                h += modes.quadrature(i) * modes.quadrature(j) * real(0.5 * coeff);
            }
        }
    }
    Ok((&h + h.adjoint()) * real(0.5))
}

/// Spectral data of a truncated quadratic Hamiltonian, reusable across times.
#[derive(Debug, Clone)]
pub struct TruncatedEvolution {
    modes: TruncatedModes,
    model: QuadraticModel,
    energies: nalgebra::DVector<f64>,
    eigenvectors: ComplexMatrix,
}

impl TruncatedEvolution {
    pub fn new(model: &QuadraticModel, cutoff: usize) -> Result<Self> {
        let modes = build_quadratures(model.n(), cutoff)?;
        let model = model.to_basis(Basis::Block);
        let h = quadratic_hamiltonian(&modes, model.matrix())?;
        let eig = SymmetricEigen::new(h);
        Ok(Self { modes, model, energies: eig.eigenvalues, eigenvectors: eig.eigenvectors })
    }

    pub fn modes(&self) -> &TruncatedModes {
        &self.modes
    }

    /// `U(t) = e^{-iHt}`.
    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        let phases = self.energies.map(|e| Complex::from_polar(1.0, -e * t));
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (mut column, phase) in scaled.column_iter_mut().zip(phases.iter()) {
            column *= *phase;
        }
        scaled * v.adjoint()
    }

    /// `max_j ‖P(U†R_jU - Σ_k S(t)_kj R_k)P‖_∞`, with `P` onto occupations below `⌈d/2⌉`.
    pub fn heisenberg_defect(&self, t: f64) -> Result<HeisenbergReport> {
        let u = self.unitary(t);
        let s = self.model.evolve(t)?.into_matrix();
        let idx = self.modes.low_lying(self.modes.cutoff.div_ceil(2));
        let dim = 2 * self.modes.modes;
        let u_adj = u.adjoint();
        let mut defect = 0.0f64;
        for j in 0..dim {
            let evolved = &u_adj * self.modes.quadrature(j) * &u;
            let mut predicted = ComplexMatrix::zeros(u.nrows(), u.ncols());
            for k in 0..dim {
                predicted += self.modes.quadrature(k) * real(s[(k, j)]);
            }
            defect = defect.max(complex_op_norm(&submatrix(&(evolved - predicted), &idx)));
        }
        let unitarity =
            (&u_adj * &u - ComplexMatrix::identity(u.nrows(), u.ncols())).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        Ok(HeisenbergReport { defect, unitarity_defect: unitarity, cutoff: self.modes.cutoff, t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergReport {
    pub defect: f64,
    pub unitarity_defect: f64,
    pub cutoff: usize,
    pub t: f64,
}

/// One-shot Heisenberg-picture comparison between `U(t)` and `S(t)`.
pub fn heisenberg_check(model: &QuadraticModel, t: f64, cutoff: usize) -> Result<HeisenbergReport> {
    TruncatedEvolution::new(model, cutoff)?.heisenberg_defect(t)
}

/// Beamsplitter `H = g(a b† + a† b) = g(x_1 x_2 + p_1 p_2)` between two modes, block basis.
pub fn beamsplitter(g: f64) -> Result<QuadraticModel> {
    let mut a = nalgebra::DMatrix::zeros(4, 4);
    a[(0, 1)] = g;
    a[(1, 0)] = g;
    a[(2, 3)] = g;
    a[(3, 2)] = g;
    QuadraticModel::new(a, Basis::Block)
}

/// Re-expresses a quadratic model in the block ordering the oracle uses.
pub fn to_oracle_basis(model: &QuadraticModel) -> Result<QuadraticModel> {
    let perm = basis_conversion(model.n())?;
    QuadraticModel::new(perm.convert(model.matrix(), model.basis(), Basis::Block), Basis::Block)
}
