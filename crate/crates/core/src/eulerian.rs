//! Eulerian decoupling: correction pulses follow an Eulerian cycle of the Cayley
//! graph of `G` and each pulse is spread over a segment as a continuous path
//! `γ̃(s)` from `1` to `γ`, so no operation needs infinite strength.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::averaging::homogenized_frequency;
use crate::error::{Error, Result};
use crate::groups::{generated_subgroup, Monomial};
use crate::symplectic::{
    basis_conversion, checked_symmetric, expm_real, j_matrix, symplectic_defect, Basis, Matrix, SymplecticMatrix,
};

/// Default number of midpoint sub-steps per pulse segment.
pub const DEFAULT_SUBSTEPS: usize = 16;

/// Reconstruction tolerance for `e^{τX/2} e^{τY/2} = γ`.
pub const SPLIT_TOLERANCE: f64 = 1e-9;

/// Directed Cayley graph with vertices `G` and edges `(h, γh)` for `γ ∈ Γ`.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    vertices: Vec<Monomial>,
    generators: Vec<Monomial>,
    /// `successor[v][i]` is the index of `Γ_i · vertices[v]`.
    successor: Vec<Vec<usize>>,
}

impl CayleyGraph {
    pub fn vertices(&self) -> &[Monomial] {
        &self.vertices
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.generators
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len() * self.generators.len()
    }

    /// Edges as `(from, to, generator)` index triples, ordered by source then generator.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        self.successor
            .iter()
            .enumerate()
            .flat_map(|(v, succ)| succ.iter().enumerate().map(move |(i, &w)| (v, w, i)))
            .collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for succ in &self.successor {
            for &w in succ {
                deg[w] += 1;
            }
        }
        deg
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.successor.iter().map(Vec::len).collect()
    }
}

/// Builds `C(G, Γ)` after checking that `Γ` generates exactly `G`.
pub fn build_cayley_graph(group: &[Monomial], generators: &[Monomial]) -> Result<CayleyGraph> {
    if group.is_empty() || generators.is_empty() {
        return Err(Error::InvalidParameter("group and generator list must be nonempty".into()));
    }
    let index: HashMap<&Monomial, usize> = group.iter().enumerate().map(|(i, g)| (g, i)).collect();
    if index.len() != group.len() {
        return Err(Error::InvalidParameter("group list contains duplicates".into()));
    }
    let reached = generated_subgroup(generators)?;
    let reached_set: HashSet<&Monomial> = reached.iter().collect();
    if reached.len() != group.len() || !group.iter().all(|g| reached_set.contains(g)) {
        return Err(Error::NotGenerating { reached: reached.len(), order: group.len() });
    }
    let successor = group.iter().map(|h| generators.iter().map(|gamma| index[&gamma.compose(h)]).collect()).collect();
    let graph = CayleyGraph { vertices: group.to_vec(), generators: generators.to_vec(), successor };
    if graph.in_degrees() != graph.out_degrees() {
        return Err(Error::NotEulerian("in-degree differs from out-degree".into()));
    }
    Ok(graph)
}

/// A closed walk through every edge once.
///
/// `vertices[k]` is the frame `g_k` seen during segment `k`, and the pulse applied
/// at the end of that segment is `γ_k = g_{k+1}⁻¹ g_k = generators[pulses[k]]`.
#[derive(Debug, Clone)]
pub struct EulerianCycle {
    vertices: Vec<Monomial>,
    pulses: Vec<usize>,
    edges: Vec<(usize, usize, usize)>,
}

impl EulerianCycle {
    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn vertices(&self) -> &[Monomial] {
        &self.vertices
    }

    /// Generator index of each pulse.
    pub fn pulses(&self) -> &[usize] {
        &self.pulses
    }

    /// Graph edges in traversal order.
    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }
}

/// Hierholzer's algorithm, starting from the first vertex and taking outgoing
/// edges in generator order.
///
/// The walk `h_0, h_1, …` follows graph edges `h_{k+1} = γ h_k`; the decoupling
/// frames are `g_k = h_k⁻¹`, which turns each traversed edge label into the pulse
/// `g_{k+1}⁻¹ g_k = h_{k+1} h_k⁻¹ = γ`.
pub fn find_eulerian_cycle(graph: &CayleyGraph) -> Result<EulerianCycle> {
    if graph.in_degrees() != graph.out_degrees() {
        return Err(Error::NotEulerian("in-degree differs from out-degree".into()));
    }
    let mut next_out = vec![0usize; graph.vertices.len()];
    // Stack entries: (vertex, generator used to enter it).
    let mut stack: Vec<(usize, Option<usize>)> = vec![(0, None)];
    let mut circuit: Vec<(usize, Option<usize>)> = Vec::with_capacity(graph.edge_count() + 1);
    while let Some(&(v, _)) = stack.last() {
        if next_out[v] < graph.successor[v].len() {
            let gen = next_out[v];
            next_out[v] += 1;
            stack.push((graph.successor[v][gen], Some(gen)));
        } else {
            circuit.push(stack.pop().expect("nonempty stack"));
        }
    }
    circuit.reverse();
    if circuit.len() != graph.edge_count() + 1 {
        return Err(Error::NotEulerian(format!(
            "walk covers {} of {} edges; the graph is not connected",
            circuit.len() - 1,
            graph.edge_count()
        )));
    }
    let mut vertices = Vec::with_capacity(graph.edge_count());
    let mut pulses = Vec::with_capacity(graph.edge_count());
    let mut edges = Vec::with_capacity(graph.edge_count());
    for pair in circuit.windows(2) {
        let (from, _) = pair[0];
        let (to, gen) = pair[1];
        let gen = gen.expect("every step after the start records its edge");
        vertices.push(graph.vertices[from].inverse());
        pulses.push(gen);
        edges.push((from, to, gen));
    }
    Ok(EulerianCycle { vertices, pulses, edges })
}

/// `γ = e^{τX/2} e^{τY/2}` with `X` generating an orthogonal symplectic rotation and
/// `Y` a symmetric (positive) symplectic stretch.
#[derive(Debug, Clone)]
pub struct SplitGenerator {
    x: Matrix,
    y: Matrix,
    target: Matrix,
    tau: f64,
    half_x: Matrix,
    half_y: Matrix,
}

impl SplitGenerator {
    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }

    pub fn target(&self) -> &Matrix {
        &self.target
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `‖e^{τX/2} e^{τY/2} - γ‖_max`.
    pub fn reconstruction_error(&self) -> f64 {
        (&self.half_x * &self.half_y - &self.target).abs().max()
    }

    /// The continuous pulse path `γ̃(s)`, `s ∈ [0, τ]`.
    pub fn path(&self, s: f64) -> Result<Matrix> {
        let half = self.tau / 2.0;
        if s <= half {
            expm_real(&(&self.y * s))
        } else {
            Ok(expm_real(&(&self.x * (s - half)))? * &self.half_y)
        }
    }

    /// `γ̃(s)⁻¹`.
    pub fn path_inverse(&self, s: f64) -> Result<Matrix> {
        let half = self.tau / 2.0;
        if s <= half {
            expm_real(&(&self.y * -s))
        } else {
            Ok(expm_real(&(&self.y * -half))? * expm_real(&(&self.x * -(s - half)))?)
        }
    }
}

/// Splits a symplectic `γ` by polar decomposition `γ = U P`:
/// `X = (2/τ) log U` on the principal branch (eigenvalue `-1` mapped to angle `+π`),
/// `Y = (2/τ) log P`.
pub fn split_generator(gamma: &Matrix, tau: f64, basis: Basis) -> Result<SplitGenerator> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    if !gamma.is_square() || !gamma.nrows().is_multiple_of(2) || gamma.nrows() == 0 {
        return Err(Error::InvalidDimension(format!(
            "{}×{} is not a phase-space matrix",
            gamma.nrows(),
            gamma.ncols()
        )));
    }
    let n = gamma.nrows() / 2;
    let j = j_matrix(n, basis);
    let defect = symplectic_defect(gamma, &j);
    if defect > 1e-9 * gamma.norm().powi(2).max(1.0) {
        return Err(Error::NotSymplectic { defect, tolerance: 1e-9 });
    }
    let perm = basis_conversion(n)?;
    let gamma_block = perm.convert(gamma, basis, Basis::Block);

    let gram = SymmetricEigen::new(gamma_block.transpose() * &gamma_block);
    if gram.eigenvalues.iter().any(|&mu| mu <= 0.0) {
        return Err(Error::Logarithm("γᵀγ is not positive definite".into()));
    }
    let vecs = &gram.eigenvectors;
    let inv_sqrt_diag = Matrix::from_diagonal(&gram.eigenvalues.map(|mu| 1.0 / mu.sqrt()));
    let log_diag = Matrix::from_diagonal(&gram.eigenvalues.map(|mu| 0.5 * mu.ln()));
    let p_inv = vecs * inv_sqrt_diag * vecs.transpose();
    let log_p = vecs * log_diag * vecs.transpose();
    let u = &gamma_block * p_inv;
    let log_u = orthosymplectic_log(&u)?;

    let x = perm.convert(&(log_u * (2.0 / tau)), Basis::Block, basis);
    let y = perm.convert(&((&log_p + log_p.transpose()) * (1.0 / tau)), Basis::Block, basis);
    let half_x = expm_real(&(&x * (tau / 2.0)))?;
    let half_y = expm_real(&(&y * (tau / 2.0)))?;
    let split = SplitGenerator { x, y, target: gamma.clone(), tau, half_x, half_y };
    let err = split.reconstruction_error();
    if err > SPLIT_TOLERANCE {
        return Err(Error::Logarithm(format!("reconstruction error {err:e}")));
    }
    Ok(split)
}

/// Principal logarithm of a block-basis orthogonal symplectic `U = [[a, b], [-b, a]]`,
/// computed through the unitary `W = a + i b`.
fn orthosymplectic_log(u: &Matrix) -> Result<Matrix> {
    let n = u.nrows() / 2;
    let a = u.view((0, 0), (n, n));
    let b = u.view((0, n), (n, n));
    let structure = (u.view((n, n), (n, n)) - a).abs().max() + (u.view((n, 0), (n, n)) + b).abs().max();
    if structure > 1e-9 {
        return Err(Error::Logarithm(format!("orthogonal factor lacks the complex structure ({structure:e})")));
    }
    let w = DMatrix::from_fn(n, n, |r, c| Complex::new(a[(r, c)], b[(r, c)]));
    let (q, t) = nalgebra::linalg::Schur::new(w).unpack();
    let logs = t.diagonal().map(|z| {
        let mut theta = z.im.atan2(z.re);
        if theta <= -std::f64::consts::PI + 1e-9 {
            theta = std::f64::consts::PI;
        }
        Complex::new(z.norm().ln(), theta)
    });
    let z = &q * DMatrix::from_diagonal(&logs) * q.adjoint();
    let mut out = Matrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let v = z[(r, c)];
            out[(r, c)] = v.re;
            out[(r, c + n)] = v.im;
            out[(r + n, c)] = -v.im;
            out[(r + n, c + n)] = v.re;
        }
    }
    Ok(out)
}

/// Eulerian decoupling for a fixed group, generating set and basis.
#[derive(Debug, Clone)]
pub struct EulerianScheme {
    graph: CayleyGraph,
    cycle: EulerianCycle,
    basis: Basis,
}

impl EulerianScheme {
    pub fn new(group: &[Monomial], generators: &[Monomial], basis: Basis) -> Result<Self> {
        let graph = build_cayley_graph(group, generators)?;
        let cycle = find_eulerian_cycle(&graph)?;
        Ok(Self { graph, cycle, basis })
    }

    pub fn graph(&self) -> &CayleyGraph {
        &self.graph
    }

    pub fn cycle(&self) -> &EulerianCycle {
        &self.cycle
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.graph.vertices[0].dim()
    }

    /// Segment length `τ = t / (N |G| |Γ|)`.
    pub fn segment_time(&self, t: f64, repetitions: usize) -> f64 {
        t / (repetitions * self.cycle.len()) as f64
    }

    pub fn splits(&self, tau: f64) -> Result<Vec<SplitGenerator>> {
        self.graph.generators.iter().map(|g| split_generator(&g.matrix(), tau, self.basis)).collect()
    }

    /// Interaction-frame propagator of one segment,
    /// `T exp(-∫₀^τ γ̃(s)⁻¹ A J γ̃(s) ds)`, by the midpoint product rule.
    fn segment_propagator(&self, a: &Matrix, split: &SplitGenerator, substeps: usize) -> Result<Matrix> {
        let d = a.nrows();
        let h = split.tau / substeps as f64;
        let drift = expm_real(&(a * j_matrix(d / 2, self.basis) * -h))?;
        let mut acc = Matrix::identity(d, d);
        for i in 0..substeps {
            let s = (i as f64 + 0.5) * h;
            let step = split.path_inverse(s)? * &drift * split.path(s)?;
            acc = step * acc;
        }
        Ok(acc)
    }

    /// `S⁽ᴺ⁾(t)` in the lab frame: `N` passes over the cycle, each segment applying
    /// drift and the continuous pulse together.
    pub fn evolution(&self, a: &Matrix, t: f64, repetitions: usize, substeps: usize) -> Result<SymplecticMatrix> {
        let a = self.check(a)?;
        if repetitions == 0 || substeps == 0 {
            return Err(Error::InvalidParameter("repetitions and sub-steps must be positive".into()));
        }
        let tau = self.segment_time(t, repetitions);
        let splits = self.splits(tau)?;
        let lab_segments: Vec<Matrix> = splits
            .iter()
            .map(|split| Ok(split.target() * self.segment_propagator(&a, split, substeps)?))
            .collect::<Result<_>>()?;
        let d = a.nrows();
        let mut cycle = Matrix::identity(d, d);
        for &gen in &self.cycle.pulses {
            cycle = &lab_segments[gen] * cycle;
        }
        let mut total = Matrix::identity(d, d);
        for _ in 0..repetitions {
            total = &cycle * total;
        }
        SymplecticMatrix::new(total, self.basis)
    }

    /// Midpoint-rule `∫₀^τ γ̃(s)⁻¹ A J γ̃(s) ds` for generator `index`.
    pub fn segment_integral(&self, a: &Matrix, index: usize, tau: f64, substeps: usize) -> Result<Matrix> {
        let a = self.check(a)?;
        let gamma =
            self.graph.generators.get(index).ok_or_else(|| Error::InvalidParameter(format!("no generator {index}")))?;
        let split = split_generator(&gamma.matrix(), tau, self.basis)?;
        let aj = &a * j_matrix(a.nrows() / 2, self.basis);
        let h = tau / substeps as f64;
        let mut acc = Matrix::zeros(a.nrows(), a.ncols());
        for i in 0..substeps {
            let s = (i as f64 + 0.5) * h;
            acc += split.path_inverse(s)? * &aj * split.path(s)?;
        }
        Ok(acc * h)
    }

    /// `(1/(τ|G||Γ|)) Σ_g g (Σ_γ ∫₀^τ γ̃(s)⁻¹ A J γ̃(s) ds) g⁻¹`, the averaged
    /// first-order generator of one cycle.
    pub fn first_order_generator(&self, a: &Matrix, tau: f64, substeps: usize) -> Result<Matrix> {
        let d = a.nrows();
        let mut inner = Matrix::zeros(d, d);
        for index in 0..self.graph.generators.len() {
            inner += self.segment_integral(a, index, tau, substeps)?;
        }
        let mut acc = Matrix::zeros(d, d);
        let mut buf = Matrix::zeros(d, d);
        for g in &self.graph.vertices {
            g.conjugate_into(&inner, &mut buf);
            acc += &buf;
        }
        Ok(acc / (tau * self.cycle.len() as f64))
    }

    /// Writes `time_index,segment,entries…` rows: for each cycle position the `Y`
    /// generator (first half of the segment) then the `X` generator.
    pub fn write_pulse_schedule<W: Write>(&self, tau: f64, out: &mut W) -> Result<()> {
        let splits = self.splits(tau)?;
        let io = |e: std::io::Error| Error::InvalidParameter(format!("writing pulse schedule: {e}"));
        writeln!(out, "# tau={tau:e} segments={} basis={:?}", self.cycle.len(), self.basis).map_err(io)?;
        for (k, &gen) in self.cycle.pulses.iter().enumerate() {
            for (label, m) in [("Y", splits[gen].y()), ("X", splits[gen].x())] {
                let entries: Vec<String> = m.transpose().iter().map(|v| format!("{v:e}")).collect();
                writeln!(out, "{k},{label},{}", entries.join(",")).map_err(io)?;
            }
        }
        Ok(())
    }

    fn check(&self, a: &Matrix) -> Result<Matrix> {
        if a.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "scheme acts on dimension {}, matrix has {}",
                self.dim(),
                a.nrows()
            )));
        }
        checked_symmetric(a)
    }
}

/// Free-function form of [`EulerianScheme::evolution`].
pub fn eulerian_evolution(
    a: &Matrix,
    group: &[Monomial],
    generators: &[Monomial],
    basis: Basis,
    t: f64,
    repetitions: usize,
) -> Result<SymplecticMatrix> {
    EulerianScheme::new(group, generators, basis)?.evolution(a, t, repetitions, DEFAULT_SUBSTEPS)
}

/// `λ` with `λJ` closest to `m` in Hilbert–Schmidt norm, and the residual `‖m - λJ‖₂`.
pub fn project_onto_j(m: &Matrix, basis: Basis) -> (f64, f64) {
    let n = m.nrows() / 2;
    let j = j_matrix(n, basis);
    let lambda = m.dot(&j) / (2 * n) as f64;
    (lambda, (m - j * lambda).norm())
}

/// `tr A / 2n`, the rate the first-order generator reduces to when every pulse
/// path is orthogonal.
pub fn orthogonal_path_rate(a: &Matrix) -> f64 {
    homogenized_frequency(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{enumerate_homogenization_group, GroupElement, GroupSpec};
    use crate::schemes::target_evolution;
    use crate::symplectic::op_norm;
    use nalgebra::dmatrix;

    fn n1_setup() -> (Vec<Monomial>, Vec<Monomial>) {
        let group = enumerate_homogenization_group(1).unwrap().iter().map(GroupElement::monomial).collect();
        let gens = vec![GroupElement::j(1).monomial(), Monomial::identity(2).negated()];
        (group, gens)
    }

    #[test]
    fn z2_graph_and_cycle() {
        let group = vec![Monomial::identity(2), Monomial::identity(2).negated()];
        let gens = vec![Monomial::identity(2).negated()];
        let graph = build_cayley_graph(&group, &gens).unwrap();
        assert_eq!(graph.vertices().len(), 2);
        assert_eq!(graph.edge_count(), 2);
        let cycle = find_eulerian_cycle(&graph).unwrap();
        assert_eq!(cycle.len(), 2);
        assert_eq!(cycle.vertices(), &group[..]);
    }

    #[test]
    fn n1_homogenization_graph_and_cycle() {
        let (group, gens) = n1_setup();
        let graph = build_cayley_graph(&group, &gens).unwrap();
        assert_eq!(graph.edge_count(), 8);
        assert!(graph.in_degrees().iter().all(|&d| d == 2));
        assert!(graph.out_degrees().iter().all(|&d| d == 2));
        let cycle = find_eulerian_cycle(&graph).unwrap();
        assert_eq!(cycle.len(), 8);

        let mut traversed = cycle.edges().to_vec();
        let mut expected = graph.edges();
        traversed.sort_unstable();
        expected.sort_unstable();
        assert_eq!(traversed, expected);

        let m = cycle.len();
        for k in 0..m {
            let g_k = &cycle.vertices()[k];
            let g_next = &cycle.vertices()[(k + 1) % m];
            let pulse = g_next.inverse().compose(g_k);
            assert_eq!(pulse, gens[cycle.pulses()[k]]);
        }
        assert!(cycle.vertices()[0].is_identity());
    }

    #[test]
    fn non_generating_set_is_rejected() {
        let (group, _) = n1_setup();
        let gens = vec![Monomial::identity(2).negated()];
        assert!(matches!(build_cayley_graph(&group, &gens), Err(Error::NotGenerating { reached: 2, order: 4 })));
    }

    #[test]
    fn larger_group_cycle_is_valid() {
        let group: Vec<Monomial> =
            enumerate_homogenization_group(2).unwrap().iter().map(GroupElement::monomial).collect();
        let swap = Monomial::from_parts(vec![1, 0, 3, 2], vec![1, 1, 1, 1]).unwrap();
        let flip = Monomial::from_parts(vec![0, 1, 2, 3], vec![-1, 1, -1, 1]).unwrap();
        let gens = vec![GroupElement::j(2).monomial(), swap, flip];
        let graph = build_cayley_graph(&group, &gens).unwrap();
        let cycle = find_eulerian_cycle(&graph).unwrap();
        assert_eq!(cycle.len(), 48);
        let distinct: HashSet<_> = cycle.edges().iter().collect();
        assert_eq!(distinct.len(), 48);
    }

    #[test]
    fn split_examples() {
        let tau = 0.2;
        let s = split_generator(&Matrix::identity(2, 2), tau, Basis::Block).unwrap();
        assert!(s.x().abs().max() < 1e-15 && s.y().abs().max() < 1e-15);

        let j = j_matrix(1, Basis::Block);
        // J is the rotation e^{(π/2) J}.
        let s = split_generator(&j, tau, Basis::Block).unwrap();
        assert!((s.x() - &j * (std::f64::consts::PI / tau)).abs().max() < 1e-12);
        assert!(s.y().abs().max() < 1e-12);
        assert!(s.reconstruction_error() < 1e-12);

        let minus = -Matrix::identity(2, 2);
        let s = split_generator(&minus, tau, Basis::Block).unwrap();
        assert!((s.x() - &j * (2.0 * std::f64::consts::PI / tau)).abs().max() < 1e-12);
        assert!(s.reconstruction_error() < 1e-12);
        assert!((s.path(tau).unwrap() - &minus).abs().max() < 1e-12);
        assert!((s.path(0.0).unwrap() - Matrix::identity(2, 2)).abs().max() == 0.0);
    }

    #[test]
    fn split_of_squeezed_rotation() {
        let r = 0.3f64;
        let theta = 0.7f64;
        let squeeze = dmatrix![r.exp(), 0.0; 0.0, (-r).exp()];
        let rot = dmatrix![theta.cos(), theta.sin(); -theta.sin(), theta.cos()];
        let gamma = &rot * &squeeze;
        let tau = 0.5;
        let s = split_generator(&gamma, tau, Basis::Block).unwrap();
        let j = j_matrix(1, Basis::Block);
        for m in [s.x(), s.y()] {
            assert!((m.transpose() * &j + &j * m).abs().max() < 1e-12);
        }
        assert!((s.y() - s.y().transpose()).abs().max() < 1e-12);
        assert!(s.reconstruction_error() < 1e-12);
        assert!((s.path(tau).unwrap() - &gamma).abs().max() < 1e-12);

        // Same element expressed in the interleaved basis of two modes.
        let mut block = Matrix::identity(4, 4);
        block[(0, 0)] = gamma[(0, 0)];
        block[(0, 2)] = gamma[(0, 1)];
        block[(2, 0)] = gamma[(1, 0)];
        block[(2, 2)] = gamma[(1, 1)];
        let big = basis_conversion(2).unwrap().to_interleaved(&block);
        let s = split_generator(&big, tau, Basis::Interleaved).unwrap();
        assert!(s.reconstruction_error() < 1e-12);
    }

    #[test]
    fn split_rejects_non_symplectic() {
        let m = dmatrix![2.0, 0.0; 0.0, 2.0];
        assert!(matches!(split_generator(&m, 0.1, Basis::Block), Err(Error::NotSymplectic { .. })));
    }

    #[test]
    fn zero_drift_cycle_closes() {
        let (group, gens) = n1_setup();
        let s = eulerian_evolution(&Matrix::zeros(2, 2), &group, &gens, Basis::Block, 1.0, 3).unwrap();
        assert!((s.matrix() - Matrix::identity(2, 2)).abs().max() < 1e-12);
    }

    #[test]
    fn first_order_generator_is_homogeneous() {
        let (group, gens) = n1_setup();
        let scheme = EulerianScheme::new(&group, &gens, Basis::Block).unwrap();
        let a = dmatrix![1.3, 0.4; 0.4, 0.6];
        let g = scheme.first_order_generator(&a, 0.01, DEFAULT_SUBSTEPS).unwrap();
        let (lambda, residual) = project_onto_j(&g, Basis::Block);
        assert!(residual < 1e-12, "residual {residual}");
        assert!((lambda - orthogonal_path_rate(&a)).abs() < 1e-12);
    }

    #[test]
    fn evolution_converges_to_target() {
        let (group, gens) = n1_setup();
        let scheme = EulerianScheme::new(&group, &gens, Basis::Block).unwrap();
        let a = dmatrix![1.3, 0.4; 0.4, 0.6];
        let target = target_evolution(&a, &GroupSpec::Homogenization { n: 1, basis: Basis::Block }, 1.0).unwrap();
        let dev =
            |n| op_norm(&(scheme.evolution(&a, 1.0, n, DEFAULT_SUBSTEPS).unwrap().into_matrix() - target.matrix()));
        let (d8, d16, d32) = (dev(8), dev(16), dev(32));
        assert!(d8 > d16 && d16 > d32);
        let r = d16 / d32;
        assert!((1.6..=2.4).contains(&r), "ratio {r}");
    }

    #[test]
    fn pulse_schedule_format() {
        let (group, gens) = n1_setup();
        let scheme = EulerianScheme::new(&group, &gens, Basis::Block).unwrap();
        let mut buf = Vec::new();
        scheme.write_pulse_schedule(0.1, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 16);
        assert!(rows[0].starts_with("0,Y,"));
        assert!(rows[1].starts_with("0,X,"));
        assert_eq!(rows[0].split(',').count(), 2 + 4);
    }
}
