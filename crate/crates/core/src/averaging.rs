//! Group averages (twirls): `Π₀` for finite-dimensional decoupling, `Π` for
//! homogenization and `Π̃` for system-only suppression.

use nalgebra::{Cholesky, Complex, DMatrix};

use crate::error::{Error, Result};
use crate::groups::{enumerate_homogenization_group, suppression_group, GroupSpec, Monomial, UnitaryDecouplingElement};
use crate::symplectic::{checked_symmetric, hs_norm_sq, j_matrix, Basis, Matrix};

/// `(1/|G|) Σ g A gᵀ` over an explicit list of group elements.
pub fn pi_map(a: &Matrix, group: &[Monomial]) -> Result<Matrix> {
    let a = checked_symmetric(a)?;
    if group.is_empty() {
        return Err(Error::InvalidParameter("empty group".into()));
    }
    if group.iter().any(|g| g.dim() != a.nrows()) {
        return Err(Error::DimensionMismatch(format!(
            "group acts on dimension {}, matrix has {}",
            group[0].dim(),
            a.nrows()
        )));
    }
    let mut acc = Matrix::zeros(a.nrows(), a.ncols());
    let mut buf = acc.clone();
    for g in group {
        g.conjugate_into(&a, &mut buf);
        acc += &buf;
    }
    Ok(acc / group.len() as f64)
}

/// `Π(A)` by enumerating `⟨1₂ ⊗ O(n, ℤ), J⟩`; limited to small `n`.
pub fn pi_map_enumerated(a: &Matrix, basis: Basis) -> Result<Matrix> {
    let n = mode_count(a)?;
    let group: Vec<Monomial> = enumerate_homogenization_group(n)?.iter().map(|g| g.monomial_in(basis)).collect();
    pi_map(a, &group)
}

/// `Π(A) = (tr A / 2n) · 1` for the homogenization group, in any basis.
pub fn pi_map_closed_form(a: &Matrix) -> Result<Matrix> {
    let a = checked_symmetric(a)?;
    mode_count(&a)?;
    let d = a.nrows();
    Ok(Matrix::identity(d, d) * homogenized_frequency(&a))
}

/// The averaged frequency `λ = tr A / 2n`.
pub fn homogenized_frequency(a: &Matrix) -> f64 {
    a.trace() / a.nrows() as f64
}

fn mode_count(a: &Matrix) -> Result<usize> {
    if !a.is_square() || a.nrows() == 0 || !a.nrows().is_multiple_of(2) {
        return Err(Error::InvalidDimension(format!(
            "expected a nonempty even square matrix, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows() / 2)
}

/// `Π₀(x) = (1/|V|) Σ v† x v`.
pub fn pi0_map(x: &DMatrix<Complex<f64>>, set: &[UnitaryDecouplingElement]) -> Result<DMatrix<Complex<f64>>> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("empty decoupling set".into()));
    }
    let n = x.nrows();
    if !x.is_square() || set.iter().any(|v| v.perm().len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "decoupling set on dimension {}, operator {}×{}",
            set[0].perm().len(),
            x.nrows(),
            x.ncols()
        )));
    }
    let mut acc = DMatrix::zeros(n, n);
    for v in set {
        let m = v.matrix();
        acc += m.adjoint() * x * m;
    }
    Ok(acc / Complex::new(set.len() as f64, 0.0))
}

/// A system coupled to an environment, in the interleaved basis:
/// `A = [[A_S, I], [Iᵀ, A_E]]` with `A_S` of size `2 n_s` and `A_E` of size `2 n_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedModel {
    n_s: usize,
    n_e: usize,
    a: Matrix,
    k: f64,
}

impl PartitionedModel {
    pub fn new(a: Matrix, n_s: usize, n_e: usize) -> Result<Self> {
        if n_s == 0 {
            return Err(Error::InvalidDimension("system needs at least one mode".into()));
        }
        let d = 2 * (n_s + n_e);
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "n_s = {n_s}, n_e = {n_e} needs {d}×{d}, got {}×{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let a = checked_symmetric(&a)?;
        let k = a.view((0, 2 * n_s), (2 * n_s, 2 * n_e)).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(Self { n_s, n_e, a, k })
    }

    pub fn from_blocks(system: &Matrix, coupling: &Matrix, environment: &Matrix) -> Result<Self> {
        let ds = system.nrows();
        let de = environment.nrows();
        if !ds.is_multiple_of(2) || !de.is_multiple_of(2) || coupling.shape() != (ds, de) {
            return Err(Error::DimensionMismatch(format!(
                "blocks {:?}, {:?}, {:?} do not form a partitioned model",
                system.shape(),
                coupling.shape(),
                environment.shape()
            )));
        }
        let mut a = Matrix::zeros(ds + de, ds + de);
        a.view_mut((0, 0), (ds, ds)).copy_from(system);
        a.view_mut((0, ds), (ds, de)).copy_from(coupling);
        a.view_mut((ds, 0), (de, ds)).copy_from(&coupling.transpose());
        a.view_mut((ds, ds), (de, de)).copy_from(environment);
        Self::new(a, ds / 2, de / 2)
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_e(&self) -> usize {
        self.n_e
    }

    pub fn n(&self) -> usize {
        self.n_s + self.n_e
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    /// Largest absolute entry of the coupling block `I`.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn system_block(&self) -> Matrix {
        self.a.view((0, 0), (2 * self.n_s, 2 * self.n_s)).into_owned()
    }

    pub fn environment_block(&self) -> Matrix {
        let ds = 2 * self.n_s;
        let de = 2 * self.n_e;
        self.a.view((ds, ds), (de, de)).into_owned()
    }

    pub fn coupling(&self) -> Matrix {
        self.a.view((0, 2 * self.n_s), (2 * self.n_s, 2 * self.n_e)).into_owned()
    }

    pub fn group_spec(&self) -> GroupSpec {
        GroupSpec::Suppression { n_s: self.n_s, n_e: self.n_e }
    }
}

/// `Π̃(A) = A_S ⊕ A_E` for the suppression group.
pub fn tilde_pi(pm: &PartitionedModel) -> Matrix {
    let mut out = pm.a.clone();
    let ds = 2 * pm.n_s;
    let de = 2 * pm.n_e;
    out.view_mut((0, ds), (ds, de)).fill(0.0);
    out.view_mut((ds, 0), (de, ds)).fill(0.0);
    out
}

/// `Π̃(A)` for a general group acting on the system only:
/// `[[avg g A_S gᵀ, (avg g) I], [Iᵀ (avg g)ᵀ, A_E]]`.
pub fn tilde_pi_with(pm: &PartitionedModel, system_group: &[Monomial]) -> Result<Matrix> {
    let ds = 2 * pm.n_s;
    let de = 2 * pm.n_e;
    if system_group.is_empty() || system_group.iter().any(|g| g.dim() != ds) {
        return Err(Error::DimensionMismatch(format!("system group must act on dimension {ds}")));
    }
    let a_s = pi_map(&pm.system_block(), system_group)?;
    let mut mean_g = Matrix::zeros(ds, ds);
    for g in system_group {
        mean_g += g.matrix();
    }
    mean_g /= system_group.len() as f64;
    let i_avg = &mean_g * pm.coupling();
    let mut out = pm.a.clone();
    out.view_mut((0, 0), (ds, ds)).copy_from(&a_s);
    out.view_mut((0, ds), (ds, de)).copy_from(&i_avg);
    out.view_mut((ds, 0), (de, ds)).copy_from(&i_avg.transpose());
    Ok(out)
}

/// `Π̃(A)` computed as the literal average `(A + D A D) / 2`, `D = -1_S ⊕ 1_E`.
pub fn tilde_pi_by_averaging(pm: &PartitionedModel) -> Result<Matrix> {
    let group = suppression_group(pm.n_s, pm.n_e)?;
    let mut acc = Matrix::zeros(pm.a.nrows(), pm.a.ncols());
    for g in &group {
        acc += g.conjugate(&pm.a);
    }
    Ok(acc / 2.0)
}

/// The generator the scheme driven by `spec` converges to: `Π(A)`, `Π̃(A)` or `A`.
pub fn averaged_generator(spec: &GroupSpec, a: &Matrix) -> Result<Matrix> {
    match *spec {
        GroupSpec::Trivial { .. } => checked_symmetric(a),
        GroupSpec::Homogenization { .. } => pi_map_closed_form(a),
        GroupSpec::Suppression { n_s, n_e } => Ok(tilde_pi(&PartitionedModel::new(a.clone(), n_s, n_e)?)),
    }
}

/// Distance of the averaged `A` from the antisymmetric line `{λJ}`:
/// `min_λ ‖(1/|G|) Σ g A gᵀ - λJ‖₂`, for positive definite `A`.
///
/// The average of a positive matrix stays positive, so it can never be a multiple
/// of `J` and the defect is strictly positive.
pub fn tentative_condition_defect(a: &Matrix, group: &[Monomial], basis: Basis) -> Result<f64> {
    let a = checked_symmetric(a)?;
    let n = mode_count(&a)?;
    if Cholesky::new(a.clone()).is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    let avg = pi_map(&a, group)?;
    let j = j_matrix(n, basis);
    let lambda = avg.dot(&j) / (2 * n) as f64;
    Ok(hs_norm_sq(&(avg - j * lambda)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::enumerate_unitary_decoupling_set;
    use crate::symplectic::op_norm;
    use nalgebra::dmatrix;
    use proptest::prelude::*;

    fn symmetric_from(values: &[f64], d: usize) -> Matrix {
        let m = Matrix::from_iterator(d, d, values.iter().copied());
        (&m + m.transpose()) * 0.5
    }

    fn homogenization_group(n: usize, basis: Basis) -> Vec<Monomial> {
        enumerate_homogenization_group(n).unwrap().iter().map(|g| g.monomial_in(basis)).collect()
    }

    #[test]
    fn pi_map_examples() {
        let id = Matrix::identity(4, 4);
        assert_eq!(pi_map_enumerated(&id, Basis::Block).unwrap(), id);

        // Direct average of the four elements {±1, ±J}: the off-diagonal b cancels
        // between 1 and J, and a, c are swapped by J.
        let (a, b, c) = (0.7, -0.3, 1.9);
        let m = dmatrix![a, b; b, c];
        let expected = dmatrix![(a + c) / 2.0, 0.0; 0.0, (a + c) / 2.0];
        let got = pi_map_enumerated(&m, Basis::Block).unwrap();
        assert!((got - expected).abs().max() < 1e-15);

        let asym = dmatrix![1.0, 2.0; 0.0, 1.0];
        assert!(matches!(pi_map_closed_form(&asym), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn pi0_map_examples() {
        let set = enumerate_unitary_decoupling_set(2).unwrap();
        let id = DMatrix::<Complex<f64>>::identity(2, 2);
        assert!((pi0_map(&id, &set).unwrap() - &id).norm() < 1e-15);
        let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]).map(|x| Complex::new(x, 0.0));
        assert!(pi0_map(&z, &set).unwrap().norm() < 1e-15);
    }

    #[test]
    fn tilde_pi_examples() {
        let a_s = dmatrix![1.0, 0.2; 0.2, 2.0];
        let a_e = dmatrix![0.5, 0.0; 0.0, 0.7];
        let zero = Matrix::zeros(2, 2);
        let pm = PartitionedModel::from_blocks(&a_s, &zero, &a_e).unwrap();
        assert_eq!(tilde_pi(&pm), *pm.matrix());
        assert_eq!(pm.k(), 0.0);

        let coupling = dmatrix![0.1, -0.05; 0.03, 0.08];
        let pm = PartitionedModel::from_blocks(&a_s, &coupling, &a_e).unwrap();
        assert_eq!(pm.k(), 0.1);
        let tp = tilde_pi(&pm);
        assert_eq!(tp.view((0, 0), (2, 2)).into_owned(), a_s);
        assert_eq!(tp.view((2, 2), (2, 2)).into_owned(), a_e);
        assert!(tp.view((0, 2), (2, 2)).iter().all(|&x| x == 0.0));
        assert_eq!(tilde_pi_by_averaging(&pm).unwrap(), tp);
    }

    #[test]
    fn tilde_pi_with_homogenization_on_system() {
        let a_s = dmatrix![1.0, 0.2, 0.1, 0.0; 0.2, 2.0, 0.3, 0.4; 0.1, 0.3, 0.5, 0.0; 0.0, 0.4, 0.0, 0.9];
        let coupling = dmatrix![0.1, -0.05; 0.03, 0.08; 0.02, 0.01; -0.04, 0.06];
        let a_e = dmatrix![0.5, 0.1; 0.1, 0.7];
        let pm = PartitionedModel::from_blocks(&a_s, &coupling, &a_e).unwrap();
        let group = homogenization_group(2, Basis::Interleaved);
        let out = tilde_pi_with(&pm, &group).unwrap();
        let lambda = a_s.trace() / 4.0;
        assert!((out.view((0, 0), (4, 4)) - Matrix::identity(4, 4) * lambda).abs().max() < 1e-15);
        assert!(out.view((0, 4), (4, 2)).abs().max() < 1e-15);
        assert_eq!(out.view((4, 4), (2, 2)).into_owned(), a_e);

        let supp: Vec<Monomial> = vec![Monomial::identity(4), Monomial::identity(4).negated()];
        assert_eq!(tilde_pi_with(&pm, &supp).unwrap(), tilde_pi(&pm));
    }

    #[test]
    fn tentative_defect_examples() {
        let group = homogenization_group(1, Basis::Block);
        let d = tentative_condition_defect(&Matrix::identity(2, 2), &group, Basis::Block).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        let not_pd = dmatrix![1.0, 0.0; 0.0, -1.0];
        assert!(matches!(tentative_condition_defect(&not_pd, &group, Basis::Block), Err(Error::NotPositiveDefinite)));
    }

    fn positive_definite(values: &[f64], d: usize) -> Matrix {
        let m = Matrix::from_iterator(d, d, values.iter().copied());
        &m * m.transpose() + Matrix::identity(d, d) * 0.1
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn enumerated_average_is_closed_form(n in 1usize..=3, values in prop::collection::vec(-2.0..2.0f64, 36)) {
            let d = 2 * n;
            let a = symmetric_from(&values[..d * d], d);
            for basis in [Basis::Block, Basis::Interleaved] {
                let avg = pi_map_enumerated(&a, basis).unwrap();
                prop_assert!((avg - pi_map_closed_form(&a).unwrap()).abs().max() < 1e-12);
            }
        }

        #[test]
        fn pi_is_idempotent_trace_preserving_and_contractive(n in 1usize..=3, values in prop::collection::vec(-2.0..2.0f64, 36)) {
            let d = 2 * n;
            let a = symmetric_from(&values[..d * d], d);
            let group = homogenization_group(n, Basis::Block);
            let p = pi_map(&a, &group).unwrap();
            let pp = pi_map(&p, &group).unwrap();
            prop_assert!((&pp - &p).abs().max() < 1e-12);
            prop_assert!((p.trace() - a.trace()).abs() < 1e-12 * (1.0 + a.trace().abs()));
            prop_assert!(op_norm(&p) <= op_norm(&a) * (1.0 + 1e-12));
        }

        #[test]
        fn suppression_average_is_bit_exact(n_s in 1usize..=2, n_e in 0usize..=4, values in prop::collection::vec(-1.0..1.0f64, 144)) {
            let d = 2 * (n_s + n_e);
            let a = symmetric_from(&values[..d * d], d);
            let pm = PartitionedModel::new(a, n_s, n_e).unwrap();
            let tp = tilde_pi(&pm);
            prop_assert_eq!(tilde_pi_by_averaging(&pm).unwrap(), tp.clone());
            let diff = pm.matrix() - &tp;
            let gram = diff.transpose() * &diff;
            let ds = 2 * n_s;
            let i = pm.coupling();
            prop_assert!((gram.view((0, 0), (ds, ds)) - &i * i.transpose()).abs().max() < 1e-14);
            prop_assert!((gram.view((ds, ds), (d - ds, d - ds)) - i.transpose() * &i).abs().max() < 1e-14);
            prop_assert!(gram.view((0, ds), (ds, d - ds)).iter().all(|&x| x == 0.0));
        }

        #[test]
        fn tentative_defect_is_positive_and_invariant(values in prop::collection::vec(-1.0..1.0f64, 16), g_index in 0usize..16) {
            let a = positive_definite(&values, 4);
            let group = homogenization_group(2, Basis::Block);
            let defect = tentative_condition_defect(&a, &group, Basis::Block).unwrap();
            let min_eig = pi_map(&a, &group).unwrap().symmetric_eigenvalues().min();
            prop_assert!(defect >= min_eig * (1.0 - 1e-12));
            prop_assert!(defect > 0.0);
            let moved = group[g_index].conjugate(&a);
            let moved_defect = tentative_condition_defect(&moved, &group, Basis::Block).unwrap();
            prop_assert!((moved_defect - defect).abs() < 1e-12);
        }
    }
}
