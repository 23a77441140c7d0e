//! Finite groups used for decoupling, homogenization and suppression.
//!
//! Every group here is monomial: each element maps basis vectors to signed (or
//! phase-multiplied) basis vectors. Elements are stored structurally and turned
//! into matrices only on demand, so products, inverses and conjugations are exact.

use std::collections::HashSet;

use itertools::Itertools;
use nalgebra::{Complex, DMatrix};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::symplectic::{basis_conversion, Basis, Matrix};

/// Largest `n` for which the homogenization group is fully enumerated
/// (`2 · 2⁶ · 6! = 92160` elements).
pub const MAX_ENUMERATION_MODES: usize = 6;

/// Largest `n` for the finite-dimensional unitary decoupling set (`4³ · 3! = 384`).
pub const MAX_UNITARY_DIM: usize = 3;

/// Element of `O(n, ℤ)`: `O e_j = signs[j] · e_{perm[j]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        if perm.len() != signs.len() || perm.is_empty() {
            return Err(Error::InvalidDimension(format!(
                "permutation of length {} with {} signs",
                perm.len(),
                signs.len()
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(format!("signs must be ±1, got {signs:?}")));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect(), signs: vec![1; n] }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let signs = other.perm.iter().zip(&other.signs).map(|(&j, &s)| s * self.signs[j]).collect();
        Self { perm, signs }
    }

    pub fn inverse(&self) -> Self {
        let n = self.n();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for j in 0..n {
            perm[self.perm[j]] = j;
            signs[self.perm[j]] = self.signs[j];
        }
        Self { perm, signs }
    }

    fn negated(&self) -> Self {
        Self { perm: self.perm.clone(), signs: self.signs.iter().map(|s| -s).collect() }
    }

    pub fn matrix(&self) -> DMatrix<i64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m[(self.perm[j], j)] = i64::from(self.signs[j]);
        }
        m
    }
}

/// A signed permutation matrix of arbitrary dimension: `g e_i = sign[i] · e_{target[i]}`.
///
/// This is the working representation of every symplectic group element used by
/// the evolution schemes; conjugation costs `O(d²)` instead of two dense products.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    target: Vec<usize>,
    sign: Vec<i8>,
}

impl Monomial {
    pub fn identity(dim: usize) -> Self {
        Self { target: (0..dim).collect(), sign: vec![1; dim] }
    }

    pub fn from_parts(target: Vec<usize>, sign: Vec<i8>) -> Result<Self> {
        SignedPermutation::new(target, sign).map(|sp| Self { target: sp.perm, sign: sp.signs })
    }

    /// Recovers the monomial structure of an integer-valued matrix, if it has one.
    pub fn from_matrix(m: &Matrix) -> Option<Self> {
        if !m.is_square() {
            return None;
        }
        let d = m.nrows();
        let mut target = vec![0; d];
        let mut sign = vec![0i8; d];
        for j in 0..d {
            let nonzero: Vec<usize> = (0..d).filter(|&i| m[(i, j)] != 0.0).collect();
            if nonzero.len() != 1 {
                return None;
            }
            let v = m[(nonzero[0], j)];
            if v != 1.0 && v != -1.0 {
                return None;
            }
            target[j] = nonzero[0];
            sign[j] = v as i8;
        }
        Self::from_parts(target, sign).ok()
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }

    pub fn signs(&self) -> &[i8] {
        &self.sign
    }

    pub fn is_identity(&self) -> bool {
        self.target.iter().enumerate().all(|(i, &t)| i == t) && self.sign.iter().all(|&s| s == 1)
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let target = other.target.iter().map(|&j| self.target[j]).collect();
        let sign = other.target.iter().zip(&other.sign).map(|(&j, &s)| s * self.sign[j]).collect();
        Self { target, sign }
    }

    pub fn inverse(&self) -> Self {
        let d = self.dim();
        let mut target = vec![0; d];
        let mut sign = vec![1; d];
        for i in 0..d {
            target[self.target[i]] = i;
            sign[self.target[i]] = self.sign[i];
        }
        Self { target, sign }
    }

    pub fn negated(&self) -> Self {
        Self { target: self.target.clone(), sign: self.sign.iter().map(|s| -s).collect() }
    }

    /// `self ⊕ 1_extra`.
    pub fn direct_sum_identity(&self, extra: usize) -> Self {
        let d = self.dim();
        let mut target = self.target.clone();
        let mut sign = self.sign.clone();
        target.extend(d..d + extra);
        sign.extend(std::iter::repeat_n(1, extra));
        Self { target, sign }
    }

    /// Re-expresses a block-basis element in another basis.
    pub fn in_basis(&self, basis: Basis) -> Self {
        match basis {
            Basis::Block => self.clone(),
            Basis::Interleaved => {
                let perm = basis_conversion(self.dim() / 2).expect("even dimension");
                let d = self.dim();
                let mut target = vec![0; d];
                let mut sign = vec![1; d];
                for i in 0..d {
                    let b = perm.source(i);
                    target[i] = perm.target(self.target[b]);
                    sign[i] = self.sign[b];
                }
                Self { target, sign }
            }
        }
    }

    pub fn matrix(&self) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            m[(self.target[i], i)] = f64::from(self.sign[i]);
        }
        m
    }

    pub fn int_matrix(&self) -> DMatrix<i64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            m[(self.target[i], i)] = i64::from(self.sign[i]);
        }
        m
    }

    /// `g M gᵀ` (equal to `g M g⁻¹`, since signed permutations are orthogonal).
    pub fn conjugate(&self, m: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(m.nrows(), m.ncols());
        self.conjugate_into(m, &mut out);
        out
    }

    pub fn conjugate_into(&self, m: &Matrix, out: &mut Matrix) {
        let d = self.dim();
        debug_assert_eq!((m.nrows(), m.ncols()), (d, d));
        for j in 0..d {
            let tj = self.target[j];
            let sj = f64::from(self.sign[j]);
            for i in 0..d {
                out[(self.target[i], tj)] = f64::from(self.sign[i]) * sj * m[(i, j)];
            }
        }
    }

    /// `g M`: row `i` of `M` moves to row `target[i]` with its sign.
    pub fn left_apply(&self, m: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(m.nrows(), m.ncols());
        for i in 0..self.dim() {
            let s = f64::from(self.sign[i]);
            for c in 0..m.ncols() {
                out[(self.target[i], c)] = s * m[(i, c)];
            }
        }
        out
    }

    /// `M g`: column `target[i]` of `M`, signed, becomes column `i`.
    pub fn right_apply(&self, m: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(m.nrows(), m.ncols());
        for i in 0..self.dim() {
            let s = f64::from(self.sign[i]);
            for r in 0..m.nrows() {
                out[(r, i)] = s * m[(r, self.target[i])];
            }
        }
        out
    }
}

/// Element `(1₂ ⊗ O) · J^{j_power}` of `G = ⟨1₂ ⊗ O(n, ℤ), J⟩`.
///
/// Since `J² = -1 = 1₂ ⊗ (-1_n)` lies in `1₂ ⊗ O(n, ℤ)`, `j_power ∈ {0, 1}` gives a
/// normal form; the closure tests confirm it is unique.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    sp: SignedPermutation,
    j_power: u8,
}

impl GroupElement {
    pub fn new(sp: SignedPermutation, j_power: u8) -> Result<Self> {
        if j_power > 1 {
            return Err(Error::InvalidParameter(format!("j_power must be 0 or 1, got {j_power}")));
        }
        Ok(Self { sp, j_power })
    }

    pub fn identity(n: usize) -> Self {
        Self { sp: SignedPermutation::identity(n), j_power: 0 }
    }

    /// `J` itself.
    pub fn j(n: usize) -> Self {
        Self { sp: SignedPermutation::identity(n), j_power: 1 }
    }

    pub fn n(&self) -> usize {
        self.sp.n()
    }

    pub fn signed_permutation(&self) -> &SignedPermutation {
        &self.sp
    }

    pub fn j_power(&self) -> u8 {
        self.j_power
    }

    pub fn is_identity(&self) -> bool {
        self.j_power == 0 && self.sp == SignedPermutation::identity(self.n())
    }

    /// `self · other`, using that `1₂ ⊗ O` commutes with `J`.
    pub fn compose(&self, other: &Self) -> Self {
        let sp = self.sp.compose(&other.sp);
        match self.j_power + other.j_power {
            2 => Self { sp: sp.negated(), j_power: 0 },
            p => Self { sp, j_power: p },
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = self.sp.inverse();
        if self.j_power == 0 {
            Self { sp: inv, j_power: 0 }
        } else {
            // (O J)⁻¹ = O⁻¹ J⁻¹ = O⁻¹ (-1) J
            Self { sp: inv.negated(), j_power: 1 }
        }
    }

    /// Block-basis monomial structure of the realized `2n × 2n` matrix.
    pub fn monomial(&self) -> Monomial {
        let n = self.n();
        let mut target = vec![0; 2 * n];
        let mut sign = vec![1i8; 2 * n];
        for half in 0..2 {
            for j in 0..n {
                target[half * n + j] = half * n + self.sp.perm[j];
                sign[half * n + j] = self.sp.signs[j];
            }
        }
        let lifted = Monomial { target, sign };
        if self.j_power == 0 {
            lifted
        } else {
            lifted.compose(&j_monomial(n))
        }
    }

    pub fn monomial_in(&self, basis: Basis) -> Monomial {
        self.monomial().in_basis(basis)
    }

    /// Exact integer realization in the block basis.
    pub fn matrix(&self) -> DMatrix<i64> {
        self.monomial().int_matrix()
    }
}

/// Block-basis `J` as a monomial: `J e_j = -e_{n+j}`, `J e_{n+j} = e_j`.
fn j_monomial(n: usize) -> Monomial {
    let mut target = vec![0; 2 * n];
    let mut sign = vec![1i8; 2 * n];
    for j in 0..n {
        target[j] = n + j;
        sign[j] = -1;
        target[n + j] = j;
    }
    Monomial { target, sign }
}

/// `2 · 2ⁿ · n!`, or `None` on overflow.
pub fn homogenization_group_order(n: usize) -> Option<usize> {
    let mut order: usize = 2usize.checked_mul(1usize.checked_shl(n as u32)?)?;
    for k in 2..=n {
        order = order.checked_mul(k)?;
    }
    Some(order)
}

/// Exact integer realization of `g` in the block basis.
pub fn element_matrix(g: &GroupElement) -> DMatrix<i64> {
    g.matrix()
}

/// All of `⟨1₂ ⊗ O(n, ℤ), J⟩`, identity first.
///
/// Order: `j_power` outermost, then permutations lexicographically, then sign
/// patterns as a bitmask (bit `j` set means `signs[j] = -1`).
pub fn enumerate_homogenization_group(n: usize) -> Result<Vec<GroupElement>> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be at least 1".into()));
    }
    if n > MAX_ENUMERATION_MODES {
        return Err(Error::EnumerationTooLarge { n, limit: MAX_ENUMERATION_MODES });
    }
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let mut out = Vec::with_capacity(homogenization_group_order(n).expect("small n"));
    for j_power in 0..2u8 {
        for perm in &perms {
            for mask in 0..(1u32 << n) {
                let signs = (0..n).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
                out.push(GroupElement { sp: SignedPermutation { perm: perm.clone(), signs }, j_power });
            }
        }
    }
    Ok(out)
}

/// Uniform draw from the homogenization group via its product structure.
pub fn sample_group_element<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GroupElement {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let signs = (0..n).map(|_| if rng.random::<bool>() { -1 } else { 1 }).collect();
    let j_power = u8::from(rng.random::<bool>());
    GroupElement { sp: SignedPermutation { perm, signs }, j_power }
}

/// The two-element suppression group `{1 ⊕ 1, -1 ⊕ 1}` in the interleaved basis,
/// with the system occupying the first `2 n_s` coordinates.
pub fn suppression_group(n_s: usize, n_e: usize) -> Result<Vec<Monomial>> {
    if n_s == 0 {
        return Err(Error::InvalidDimension("system needs at least one mode".into()));
    }
    let flip = Monomial::identity(2 * n_s).negated().direct_sum_identity(2 * n_e);
    Ok(vec![Monomial::identity(2 * (n_s + n_e)), flip])
}

/// Element of `U(n, {0, ±1, ±i})`: `v e_j = i^{phases[j]} · e_{perm[j]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitaryDecouplingElement {
    perm: Vec<usize>,
    phases: Vec<u8>,
}

impl UnitaryDecouplingElement {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect(), phases: vec![0; n] }
    }

    pub fn from_permutation(perm: Vec<usize>) -> Self {
        let n = perm.len();
        Self { perm, phases: vec![0; n] }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phases(&self) -> &[u8] {
        &self.phases
    }

    pub fn compose(&self, other: &Self) -> Self {
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let phases = other.perm.iter().zip(&other.phases).map(|(&j, &p)| (p + self.phases[j]) % 4).collect();
        Self { perm, phases }
    }

    pub fn inverse(&self) -> Self {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut phases = vec![0; n];
        for j in 0..n {
            perm[self.perm[j]] = j;
            phases[self.perm[j]] = (4 - self.phases[j]) % 4;
        }
        Self { perm, phases }
    }

    pub fn matrix(&self) -> DMatrix<Complex<f64>> {
        const UNITS: [Complex<f64>; 4] =
            [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(-1.0, 0.0), Complex::new(0.0, -1.0)];
        let n = self.perm.len();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m[(self.perm[j], j)] = UNITS[self.phases[j] as usize];
        }
        m
    }
}

/// All of `U(n, {0, ±1, ±i})`, `4ⁿ · n!` elements.
pub fn enumerate_unitary_decoupling_set(n: usize) -> Result<Vec<UnitaryDecouplingElement>> {
    if n == 0 {
        return Err(Error::InvalidDimension("dimension must be at least 1".into()));
    }
    if n > MAX_UNITARY_DIM {
        return Err(Error::EnumerationTooLarge { n, limit: MAX_UNITARY_DIM });
    }
    let mut out = Vec::new();
    for perm in (0..n).permutations(n) {
        for code in 0..4u32.pow(n as u32) {
            let phases = (0..n).map(|j| ((code >> (2 * j)) & 3) as u8).collect();
            out.push(UnitaryDecouplingElement { perm: perm.clone(), phases });
        }
    }
    Ok(out)
}

/// Which decoupling group drives a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupSpec {
    /// `{1}`; the undecoupled evolution.
    Trivial { n: usize, basis: Basis },
    /// `⟨1₂ ⊗ O(n, ℤ), J⟩` expressed in `basis`.
    Homogenization { n: usize, basis: Basis },
    /// `{±1_{2 n_s} ⊕ 1_{2 n_e}}` in the interleaved basis.
    Suppression { n_s: usize, n_e: usize },
}

impl GroupSpec {
    pub fn dim(&self) -> usize {
        match *self {
            GroupSpec::Trivial { n, .. } => 2 * n,
            GroupSpec::Homogenization { n, .. } => 2 * n,
            GroupSpec::Suppression { n_s, n_e } => 2 * (n_s + n_e),
        }
    }

    pub fn n(&self) -> usize {
        self.dim() / 2
    }

    /// Basis in which the group elements (and hence `A` and `J`) are expressed.
    pub fn basis(&self) -> Basis {
        match *self {
            GroupSpec::Trivial { basis, .. } | GroupSpec::Homogenization { basis, .. } => basis,
            GroupSpec::Suppression { .. } => Basis::Interleaved,
        }
    }

    pub fn order(&self) -> Option<usize> {
        match *self {
            GroupSpec::Trivial { .. } => Some(1),
            GroupSpec::Homogenization { n, .. } => homogenization_group_order(n),
            GroupSpec::Suppression { .. } => Some(2),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Monomial {
        match *self {
            GroupSpec::Trivial { n, .. } => Monomial::identity(2 * n),
            GroupSpec::Homogenization { n, basis } => sample_group_element(n, rng).monomial_in(basis),
            GroupSpec::Suppression { n_s, n_e } => {
                let id = Monomial::identity(2 * n_s);
                let sys = if rng.random::<bool>() { id.negated() } else { id };
                sys.direct_sum_identity(2 * n_e)
            }
        }
    }

    /// All elements, identity first.
    pub fn enumerate(&self) -> Result<Vec<Monomial>> {
        match *self {
            GroupSpec::Trivial { n, .. } => Ok(vec![Monomial::identity(2 * n)]),
            GroupSpec::Homogenization { n, basis } => {
                Ok(enumerate_homogenization_group(n)?.iter().map(|g| g.monomial_in(basis)).collect())
            }
            GroupSpec::Suppression { n_s, n_e } => suppression_group(n_s, n_e),
        }
    }
}

/// Brute-force closure of a generating set under multiplication, for verification.
pub fn generated_subgroup(generators: &[Monomial]) -> Result<Vec<Monomial>> {
    let dim =
        generators.first().map(Monomial::dim).ok_or_else(|| Error::InvalidParameter("empty generator list".into()))?;
    let identity = Monomial::identity(dim);
    let mut seen: HashSet<Monomial> = HashSet::from([identity.clone()]);
    let mut order = vec![identity];
    let mut frontier = 0;
    while frontier < order.len() {
        let g = order[frontier].clone();
        frontier += 1;
        for gamma in generators {
            let h = gamma.compose(&g);
            if seen.insert(h.clone()) {
                order.push(h);
            }
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from_seed;
    use crate::symplectic::j_matrix;

    fn int_j(n: usize) -> DMatrix<i64> {
        j_matrix(n, Basis::Block).map(|x| x as i64)
    }

    #[test]
    fn group_orders() {
        for (n, expected) in [(1, 4), (2, 16), (3, 96), (4, 768)] {
            assert_eq!(enumerate_homogenization_group(n).unwrap().len(), expected);
            assert_eq!(homogenization_group_order(n), Some(expected));
        }
        assert!(matches!(enumerate_homogenization_group(7), Err(Error::EnumerationTooLarge { n: 7, .. })));
    }

    #[test]
    fn n1_group_is_plus_minus_identity_and_j() {
        let els: HashSet<DMatrix<i64>> =
            enumerate_homogenization_group(1).unwrap().iter().map(|g| g.matrix()).collect();
        let id = DMatrix::<i64>::identity(2, 2);
        let j = int_j(1);
        let expected: HashSet<_> = [id.clone(), -id, j.clone(), -j].into_iter().collect();
        assert_eq!(els, expected);
    }

    #[test]
    fn enumeration_matches_brute_force_closure() {
        // Oracle: close {sign flip on mode 0, adjacent transpositions, J} as integer matrices.
        for n in 1..=3 {
            let mut gens = vec![int_j(n)];
            let mut flip = DMatrix::<i64>::identity(2 * n, 2 * n);
            flip[(0, 0)] = -1;
            flip[(n, n)] = -1;
            gens.push(flip);
            for k in 0..n.saturating_sub(1) {
                let mut swap = DMatrix::<i64>::zeros(2 * n, 2 * n);
                for h in 0..2 {
                    for i in 0..n {
                        let j = if i == k {
                            k + 1
                        } else if i == k + 1 {
                            k
                        } else {
                            i
                        };
                        swap[(h * n + j, h * n + i)] = 1;
                    }
                }
                gens.push(swap);
            }
            let mut seen: HashSet<DMatrix<i64>> = HashSet::new();
            let mut queue = vec![DMatrix::<i64>::identity(2 * n, 2 * n)];
            seen.insert(queue[0].clone());
            while let Some(g) = queue.pop() {
                for gen in &gens {
                    let h = gen * &g;
                    if seen.insert(h.clone()) {
                        queue.push(h);
                    }
                }
            }
            let enumerated: HashSet<DMatrix<i64>> =
                enumerate_homogenization_group(n).unwrap().iter().map(|g| g.matrix()).collect();
            assert_eq!(enumerated, seen, "n = {n}");
        }
    }

    #[test]
    fn closure_inverse_and_normal_form_uniqueness() {
        for n in 1..=3 {
            let els = enumerate_homogenization_group(n).unwrap();
            let set: HashSet<&GroupElement> = els.iter().collect();
            let mats: HashSet<DMatrix<i64>> = els.iter().map(|g| g.matrix()).collect();
            assert_eq!(mats.len(), els.len(), "distinct normal forms give distinct matrices");
            for g in &els {
                assert!(g.compose(&g.inverse()).is_identity());
                assert!(set.contains(&g.inverse()));
                for h in &els {
                    let gh = g.compose(h);
                    assert!(set.contains(&gh));
                    assert_eq!(gh.matrix(), g.matrix() * h.matrix());
                }
            }
        }
    }

    #[test]
    fn elements_are_exactly_symplectic() {
        for n in 1..=4 {
            let j = int_j(n);
            for g in enumerate_homogenization_group(n).unwrap() {
                let m = g.matrix();
                assert_eq!(&m * &j * m.transpose(), j);
                assert!(m.iter().all(|&x| (-1..=1).contains(&x)));
                if g.j_power() == 0 {
                    assert_eq!(&m * &j, &j * &m);
                }
            }
        }
    }

    #[test]
    fn element_matrix_examples() {
        assert_eq!(element_matrix(&GroupElement::identity(3)), DMatrix::<i64>::identity(6, 6));
        assert_eq!(element_matrix(&GroupElement::j(1)), int_j(1));

        let sp = SignedPermutation::new(vec![1, 0], vec![1, -1]).unwrap();
        let o = DMatrix::from_row_slice(2, 2, &[0i64, -1, 1, 0]);
        assert_eq!(sp.matrix(), o);
        let g = GroupElement::new(sp, 0).unwrap();
        let expected = DMatrix::<i64>::identity(2, 2).kronecker(&o);
        assert_eq!(element_matrix(&g), expected);
    }

    #[test]
    fn monomial_conjugation_matches_dense_products() {
        let a = Matrix::from_fn(6, 6, |i, j| (i * 6 + j) as f64 * 0.37 - 1.0);
        for basis in [Basis::Block, Basis::Interleaved] {
            let perm = basis_conversion(3).unwrap();
            for g in enumerate_homogenization_group(3).unwrap().iter().step_by(7) {
                let mono = g.monomial_in(basis);
                let dense = mono.matrix();
                let expected_dense = perm.convert(&g.monomial().matrix(), Basis::Block, basis);
                assert_eq!(dense, expected_dense);
                assert_eq!(mono.conjugate(&a), &dense * &a * dense.transpose());
                assert_eq!(mono.left_apply(&a), &dense * &a);
                assert_eq!(mono.right_apply(&a), &a * &dense);
            }
        }
    }

    #[test]
    fn sampling_is_reproducible_and_inverts() {
        let mut r1 = rng_from_seed(99);
        let mut r2 = rng_from_seed(99);
        for _ in 0..50 {
            let g = sample_group_element(3, &mut r1);
            assert_eq!(g, sample_group_element(3, &mut r2));
            assert!(g.compose(&g.inverse()).is_identity());
        }
    }

    #[test]
    fn sampling_is_uniform_for_n1_and_n2() {
        for (n, draws) in [(1usize, 100_000usize), (2, 160_000)] {
            let els = enumerate_homogenization_group(n).unwrap();
            let mut counts = std::collections::HashMap::new();
            let mut rng = rng_from_seed(2024);
            for _ in 0..draws {
                *counts.entry(sample_group_element(n, &mut rng)).or_insert(0usize) += 1;
            }
            assert_eq!(counts.len(), els.len());
            let p = 1.0 / els.len() as f64;
            let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
            let mut chi2 = 0.0;
            for g in &els {
                let c = counts[g] as f64;
                let expect = draws as f64 * p;
                assert!((c - expect).abs() <= 3.0 * sigma, "n={n} count {c} vs {expect}");
                chi2 += (c - expect).powi(2) / expect;
            }
            // 99.9% quantile of χ² with 3 and 15 degrees of freedom.
            let bound = if n == 1 { 16.27 } else { 37.70 };
            assert!(chi2 < bound, "chi2 = {chi2}");
        }
    }

    #[test]
    fn suppression_group_examples() {
        let g = suppression_group(1, 1).unwrap();
        assert_eq!(g[0].matrix(), Matrix::identity(4, 4));
        let flip = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -1.0, 1.0, 1.0]));
        assert_eq!(g[1].matrix(), flip);
        let j = j_matrix(2, Basis::Interleaved);
        for el in &g {
            let m = el.matrix();
            assert_eq!(&m * &j * m.transpose(), j);
        }
        let g = suppression_group(2, 3).unwrap();
        let sum = g[0].matrix() + g[1].matrix();
        assert!(sum.view((0, 0), (4, 4)).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn unitary_decoupling_set_sizes_and_closure() {
        assert_eq!(enumerate_unitary_decoupling_set(1).unwrap().len(), 4);
        assert_eq!(enumerate_unitary_decoupling_set(2).unwrap().len(), 32);
        assert_eq!(enumerate_unitary_decoupling_set(3).unwrap().len(), 384);
        assert!(enumerate_unitary_decoupling_set(4).is_err());

        let one: HashSet<_> = enumerate_unitary_decoupling_set(1)
            .unwrap()
            .iter()
            .map(|v| {
                let z = v.matrix()[(0, 0)];
                (z.re as i64, z.im as i64)
            })
            .collect();
        assert_eq!(one, HashSet::from([(1, 0), (0, 1), (-1, 0), (0, -1)]));

        let els = enumerate_unitary_decoupling_set(2).unwrap();
        let set: HashSet<_> = els.iter().cloned().collect();
        for v in &els {
            let m = v.matrix();
            let prod = m.adjoint() * &m;
            assert!((prod - DMatrix::<Complex<f64>>::identity(2, 2)).norm() < 1e-15);
            for w in &els {
                let vw = v.compose(w);
                assert!(set.contains(&vw));
                assert!((vw.matrix() - v.matrix() * w.matrix()).norm() == 0.0);
            }
            assert!(set.contains(&v.inverse()));
        }
        for perm in (0..3).permutations(3) {
            let set3: HashSet<_> = enumerate_unitary_decoupling_set(3).unwrap().into_iter().collect();
            assert!(set3.contains(&UnitaryDecouplingElement::from_permutation(perm)));
        }
    }

    #[test]
    fn generated_subgroup_recovers_the_group() {
        let gens = vec![GroupElement::j(1).monomial(), Monomial::identity(2).negated()];
        assert_eq!(generated_subgroup(&gens).unwrap().len(), 4);
        let gens = vec![Monomial::identity(2).negated()];
        assert_eq!(generated_subgroup(&gens).unwrap().len(), 2);
    }
}
