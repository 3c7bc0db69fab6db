//! Local time-dependent Hamiltonians: model builders, schedules, the
//! coupling bound g, and the term bookkeeping behind the perimeter law.

use crate::error::{Error, Result};
use crate::lattice::{SpinGraph, ToricLayout};
use crate::quantum::{self, DenseOperator, PureState};
use crate::C64;
use faer::Mat;

/// Piecewise-constant coefficient r(t).
///
/// The value is 0 before the first segment start and holds its last
/// value afterwards. Closed-form coefficients are sampled onto a grid at
/// construction, so the propagator sees piecewise-constant input only.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Constant(f64),
    Piecewise { starts: Vec<f64>, values: Vec<f64> },
}

impl Schedule {
    pub fn constant(r: f64) -> Self {
        Schedule::Constant(r)
    }

    pub fn piecewise(starts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if starts.len() != values.len() || starts.is_empty() {
            return Err(Error::domain("schedule needs matching, nonempty starts and values"));
        }
        if !starts.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("schedule starts must be strictly increasing"));
        }
        if !starts.iter().chain(values.iter()).all(|x| x.is_finite()) {
            return Err(Error::domain("schedule entries must be finite"));
        }
        Ok(Schedule::Piecewise { starts, values })
    }

    /// Sample a closed-form coefficient onto a uniform grid.
    pub fn from_fn(f: impl Fn(f64) -> f64, t0: f64, t1: f64, dt: f64) -> Result<Self> {
        if dt <= 0.0 || t1 <= t0 {
            return Err(Error::domain("schedule sampling needs dt > 0 and t1 > t0"));
        }
        let steps = ((t1 - t0) / dt).ceil() as usize;
        let mut starts = Vec::with_capacity(steps);
        let mut values = Vec::with_capacity(steps);
        for k in 0..steps {
            let a = t0 + k as f64 * dt;
            let b = (a + dt).min(t1);
            starts.push(a);
            values.push(f(0.5 * (a + b)));
        }
        Schedule::piecewise(starts, values)
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Schedule::Constant(r) => *r,
            Schedule::Piecewise { starts, values } => {
                match starts.partition_point(|&s| s <= t) {
                    0 => 0.0,
                    idx => values[idx - 1],
                }
            }
        }
    }

    /// Recorded bound on |r(t)|.
    pub fn bound(&self) -> f64 {
        match self {
            Schedule::Constant(r) => r.abs(),
            Schedule::Piecewise { values, .. } => {
                values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
        }
    }

    /// Segment starts falling strictly inside (t0, t1).
    pub fn breakpoints_in(&self, t0: f64, t1: f64) -> Vec<f64> {
        match self {
            Schedule::Constant(_) => Vec::new(),
            Schedule::Piecewise { starts, .. } => starts
                .iter()
                .copied()
                .filter(|&s| s > t0 + 1e-15 && s < t1 - 1e-15)
                .collect(),
        }
    }

    /// Exact integral of |r(t)| over [t0, t1] (piecewise-constant pieces).
    pub fn integral_abs(&self, t0: f64, t1: f64) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        match self {
            Schedule::Constant(r) => r.abs() * (t1 - t0),
            Schedule::Piecewise { starts, .. } => {
                let mut cuts = vec![t0];
                cuts.extend(starts.iter().copied().filter(|&s| s > t0 && s < t1));
                cuts.push(t1);
                cuts.windows(2)
                    .map(|w| self.value(0.5 * (w[0] + w[1])).abs() * (w[1] - w[0]))
                    .sum()
            }
        }
    }

    /// Amplitude-and-time rescaling r(t) -> alpha * r(alpha * t).
    pub fn rescale(&self, alpha: f64) -> Self {
        match self {
            Schedule::Constant(r) => Schedule::Constant(alpha * r),
            Schedule::Piecewise { starts, values } => Schedule::Piecewise {
                starts: starts.iter().map(|s| s / alpha).collect(),
                values: values.iter().map(|v| alpha * v).collect(),
            },
        }
    }
}

/// Role of a term; the perimeter-law accounting needs to tell product
/// couplings apart from on-site/edge terms and stabilizer terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    /// 1- or 2-site term; a 2-site support must be a graph edge.
    Local,
    /// Product coupling J_A ⊗ J_B with both factor norms at most 1.
    Coupling,
    /// Multi-site stabilizer term (toric code stars/plaquettes); excluded
    /// from 2-local-only code paths.
    Stabilizer,
}

/// One term r(t) * h of the Hamiltonian sum.
#[derive(Debug, Clone)]
pub struct LocalTerm {
    base: DenseOperator,
    schedule: Schedule,
    kind: TermKind,
    base_norm: f64,
}

impl LocalTerm {
    /// `base` must be Hermitian so the assembled Hamiltonian is.
    pub fn new(base: DenseOperator, schedule: Schedule, kind: TermKind) -> Result<Self> {
        if !base.is_hermitian(1e-12) {
            return Err(Error::domain("Hamiltonian terms must be Hermitian"));
        }
        let base_norm = base.norm();
        Ok(LocalTerm { base, schedule, kind, base_norm })
    }

    pub fn support(&self) -> &[usize] {
        self.base.support()
    }

    pub fn base(&self) -> &DenseOperator {
        &self.base
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn kind(&self) -> TermKind {
        self.kind
    }

    pub fn base_norm(&self) -> f64 {
        self.base_norm
    }

    /// Does the support intersect both sides of the cut defined by `a`?
    pub fn crosses(&self, a: &[usize]) -> bool {
        let inside = self.support().iter().any(|q| a.contains(q));
        let outside = self.support().iter().any(|q| !a.contains(q));
        inside && outside
    }
}

/// Graph + terms + the coupling bound g = max_k max_t ||r_k(t) h_k||.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    graph: SpinGraph,
    terms: Vec<LocalTerm>,
    g: f64,
}

/// Dense assembly and dense propagation are capped at 12 qubits
/// (a 2^12 operator already holds 2^24 complex entries).
pub const DENSE_QUBIT_LIMIT: usize = 12;

impl HamiltonianSpec {
    pub fn new(graph: SpinGraph, terms: Vec<LocalTerm>) -> Result<Self> {
        let n = graph.n_vertices();
        for term in &terms {
            if let Some(&q) = term.support().iter().find(|&&q| q >= n) {
                return Err(Error::domain(format!("term qubit {q} outside the {n}-vertex graph")));
            }
            match term.kind() {
                TermKind::Local => match term.support() {
                    [_] => {}
                    [u, v] => {
                        if !graph.contains_edge(*u, *v) {
                            return Err(Error::domain(format!(
                                "2-local term on ({u}, {v}) is not a graph edge"
                            )));
                        }
                    }
                    s => {
                        return Err(Error::domain(format!(
                            "local terms act on 1 or 2 qubits, got {}",
                            s.len()
                        )))
                    }
                },
                TermKind::Coupling | TermKind::Stabilizer => {}
            }
        }
        let g = terms
            .iter()
            .map(|t| t.schedule().bound() * t.base_norm())
            .fold(0.0f64, f64::max);
        Ok(HamiltonianSpec { graph, terms, g })
    }

    pub fn graph(&self) -> &SpinGraph {
        &self.graph
    }

    pub fn n_qubits(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    /// The coupling bound g.
    pub fn coupling_strength(&self) -> f64 {
        self.g
    }

    /// Brute-force check value: max over a uniform time grid of
    /// max_k ||r_k(t) h_k||.
    pub fn coupling_strength_sampled(&self, t0: f64, t1: f64, points: usize) -> f64 {
        let mut best = 0.0f64;
        for i in 0..points {
            let t = t0 + (t1 - t0) * i as f64 / (points.max(2) - 1) as f64;
            for term in &self.terms {
                best = best.max(term.schedule().value(t).abs() * term.base_norm());
            }
        }
        best
    }

    /// All schedule breakpoints strictly inside (t0, t1), sorted, deduped.
    pub fn breakpoints_in(&self, t0: f64, t1: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .terms
            .iter()
            .flat_map(|t| t.schedule().breakpoints_in(t0, t1))
            .collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        pts
    }

    /// Schedule values at time t, term order. Two Hamiltonians with equal
    /// value vectors are the same operator; the propagator keys its
    /// exponential cache on this.
    pub fn schedule_values(&self, t: f64) -> Vec<f64> {
        self.terms.iter().map(|term| term.schedule().value(t)).collect()
    }

    /// Dense 2^n x 2^n matrix of H(t).
    pub fn assemble_dense(&self, t: f64) -> Result<Mat<C64>> {
        let n = self.n_qubits();
        if n > DENSE_QUBIT_LIMIT {
            return Err(Error::Capability {
                what: "dense Hamiltonian assembly",
                requested: n,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let dim = 1usize << n;
        let mut out = Mat::<C64>::zeros(dim, dim);
        for term in &self.terms {
            let r = term.schedule().value(t);
            if r == 0.0 {
                continue;
            }
            add_embedded(&mut out, term.base(), n, C64::new(r, 0.0));
        }
        Ok(out)
    }

    /// y = H(t) x without forming the dense matrix.
    pub fn matvec(&self, t: f64, x: &[C64], y: &mut [C64]) -> Result<()> {
        let n = self.n_qubits();
        if x.len() != (1usize << n) || y.len() != x.len() {
            return Err(Error::Dimension {
                context: "Hamiltonian matvec",
                expected: 1usize << n,
                found: x.len().min(y.len()),
            });
        }
        for yi in y.iter_mut() {
            *yi = C64::ZERO;
        }
        for term in &self.terms {
            let r = term.schedule().value(t);
            if r == 0.0 {
                continue;
            }
            quantum::apply_term_raw(term.base(), n, x, y, C64::new(r, 0.0), true);
        }
        Ok(())
    }

    /// (alpha*H)(alpha*t) rescaling: evolving the result for time t equals
    /// evolving self for time alpha*t.
    pub fn rescale(&self, alpha: f64) -> Result<HamiltonianSpec> {
        if alpha <= 0.0 {
            return Err(Error::domain("rescale factor must be positive"));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| LocalTerm {
                base: t.base.clone(),
                schedule: t.schedule.rescale(alpha),
                kind: t.kind,
                base_norm: t.base_norm,
            })
            .collect();
        HamiltonianSpec::new(self.graph.clone(), terms)
    }
}

/// out += scale * (small ⊗ 1) with `small` acting on its support.
fn add_embedded(out: &mut Mat<C64>, op: &DenseOperator, n: usize, scale: C64) {
    let indexer = quantum::indexer_for(op.support(), n);
    let subs = indexer.sub_table();
    let envs = indexer.env_table();
    let m = op.matrix();
    for &e in &envs {
        for (i, &oi) in subs.iter().enumerate() {
            for (j, &oj) in subs.iter().enumerate() {
                let v = m[(i, j)];
                if v != C64::ZERO {
                    out[(e | oi, e | oj)] += scale * v;
                }
            }
        }
    }
}

/// Transverse-field Ising model: -J * Z_i Z_j per edge, -h * X_i per
/// vertex; g = max(|J|, |h|). Zero couplings emit no terms.
pub fn build_tfim(graph: &SpinGraph, j: f64, h: f64) -> Result<HamiltonianSpec> {
    let mut terms = Vec::new();
    if j != 0.0 {
        for &(u, v) in graph.edges() {
            let zz = DenseOperator::pauli_z(u).product(&DenseOperator::pauli_z(v))?;
            terms.push(LocalTerm::new(
                zz.scale(C64::new(-j, 0.0)),
                Schedule::constant(1.0),
                TermKind::Local,
            )?);
        }
    }
    if h != 0.0 {
        for q in 0..graph.n_vertices() {
            terms.push(LocalTerm::new(
                DenseOperator::pauli_x(q).scale(C64::new(-h, 0.0)),
                Schedule::constant(1.0),
                TermKind::Local,
            )?);
        }
    }
    HamiltonianSpec::new(graph.clone(), terms)
}

/// Heisenberg exchange: J * (X_i X_j + Y_i Y_j + Z_i Z_j) per edge.
pub fn build_heisenberg(graph: &SpinGraph, j: f64) -> Result<HamiltonianSpec> {
    let mut terms = Vec::new();
    if j != 0.0 {
        for &(u, v) in graph.edges() {
            let xx = DenseOperator::pauli_x(u).product(&DenseOperator::pauli_x(v))?;
            let yy = DenseOperator::pauli_y(u).product(&DenseOperator::pauli_y(v))?;
            let zz = DenseOperator::pauli_z(u).product(&DenseOperator::pauli_z(v))?;
            let base = xx.add(&yy)?.add(&zz)?.scale(C64::new(j, 0.0));
            terms.push(LocalTerm::new(base, Schedule::constant(1.0), TermKind::Local)?);
        }
    }
    HamiltonianSpec::new(graph.clone(), terms)
}

/// Toric-code Hamiltonian and its logical ground pair.
#[derive(Debug, Clone)]
pub struct ToricGroundBasis {
    /// Two orthonormal logical ground states: projections of |0...0> and
    /// of (X over a horizontal non-contractible loop)|0...0>.
    pub pair: (PureState, PureState),
    /// Star operators A_s (products of X).
    pub star_ops: Vec<DenseOperator>,
    /// Plaquette operators B_p (products of Z).
    pub plaquette_ops: Vec<DenseOperator>,
}

/// Maximum toric system buildable densely.
pub const TORIC_QUBIT_LIMIT: usize = 16;

/// H = -sum_s A_s - sum_p B_p on the edge qubits of the torus. The
/// 4-qubit stabilizer terms exceed the 2-local shape, so they carry the
/// `Stabilizer` kind and are skipped by 2-local-only code paths.
pub fn build_toric_code(layout: &ToricLayout) -> Result<(HamiltonianSpec, ToricGroundBasis)> {
    let n = layout.n_qubits();
    if n > TORIC_QUBIT_LIMIT {
        return Err(Error::Capability {
            what: "dense toric-code construction",
            requested: n,
            limit: TORIC_QUBIT_LIMIT,
        });
    }
    let pauli_product = |qubits: &[usize; 4], pauli: fn(usize) -> DenseOperator| -> Result<DenseOperator> {
        let mut sorted = *qubits;
        sorted.sort_unstable();
        let mut op = pauli(sorted[0]);
        for &q in &sorted[1..] {
            op = op.product(&pauli(q))?;
        }
        Ok(op)
    };

    let mut terms = Vec::new();
    let mut star_ops = Vec::new();
    for star in &layout.stars {
        let a = pauli_product(star, DenseOperator::pauli_x)?;
        terms.push(LocalTerm::new(
            a.scale(C64::new(-1.0, 0.0)),
            Schedule::constant(1.0),
            TermKind::Stabilizer,
        )?);
        star_ops.push(a);
    }
    let mut plaquette_ops = Vec::new();
    for plaq in &layout.plaquettes {
        let b = pauli_product(plaq, DenseOperator::pauli_z)?;
        terms.push(LocalTerm::new(
            b.scale(C64::new(-1.0, 0.0)),
            Schedule::constant(1.0),
            TermKind::Stabilizer,
        )?);
        plaquette_ops.push(b);
    }
    let spec = HamiltonianSpec::new(layout.qubit_graph.clone(), terms)?;

    // Ground states: project seed basis states with prod_s (1 + A_s)/2.
    // Plaquettes already stabilize any computational basis state built
    // from closed loop patterns; the two seeds fix the logical sector.
    let project = |seed: PureState| -> Result<PureState> {
        let n = seed.n_qubits();
        let mut amps = seed.into_amplitudes();
        for a in &star_ops {
            let mut flipped = vec![C64::ZERO; amps.len()];
            quantum::apply_term_raw(a, n, &amps, &mut flipped, C64::ONE, false);
            for (x, f) in amps.iter_mut().zip(&flipped) {
                *x = 0.5 * (*x + f);
            }
        }
        PureState::normalized(n, amps)
    };

    // The second seed flips the X-type logical loop (last vertex row, so
    // the sweep-preparation protocol never needs a Hadamard on it).
    let seed1 = PureState::zero_state(n);
    let mut loop_amps = vec![C64::ZERO; 1usize << n];
    let mut loop_index = 0usize;
    for q in layout.logical_x_loop(layout.ny - 1) {
        loop_index |= 1 << (n - 1 - q);
    }
    loop_amps[loop_index] = C64::ONE;
    let seed2 = PureState::new(n, loop_amps)?;

    let pair = (project(seed1)?, project(seed2)?);
    Ok((spec, ToricGroundBasis { pair, star_ops, plaquette_ops }))
}

/// Product coupling r(t) * J_A ⊗ J_B with both factor norms at most 1.
#[derive(Debug, Clone)]
pub struct ProductCoupling {
    term: LocalTerm,
    a_support: Vec<usize>,
    b_support: Vec<usize>,
}

impl ProductCoupling {
    pub fn term(&self) -> &LocalTerm {
        &self.term
    }

    pub fn a_support(&self) -> &[usize] {
        &self.a_support
    }

    pub fn b_support(&self) -> &[usize] {
        &self.b_support
    }
}

pub fn build_product_coupling(
    ja: &DenseOperator,
    jb: &DenseOperator,
    schedule: Schedule,
) -> Result<ProductCoupling> {
    const NORM_SLACK: f64 = 1.0 + 1e-12;
    let (na, nb) = (ja.norm(), jb.norm());
    if na > NORM_SLACK || nb > NORM_SLACK {
        return Err(Error::domain(format!(
            "product coupling factors must have norm <= 1, got {na:.6} and {nb:.6}"
        )));
    }
    if !ja.is_hermitian(1e-12) || !jb.is_hermitian(1e-12) {
        return Err(Error::domain("product coupling factors must be Hermitian"));
    }
    let base = ja.product(jb)?;
    Ok(ProductCoupling {
        term: LocalTerm::new(base, schedule, TermKind::Coupling)?,
        a_support: ja.support().to_vec(),
        b_support: jb.support().to_vec(),
    })
}

/// Assemble H = H_local + sum_k r_k(t) J_A^k ⊗ J_B^k on `n` qubits.
///
/// The synthetic graph connects all qubits within each term's support
/// plus a chain backbone, purely for adjacency bookkeeping; the entropy
/// budget uses the coupling terms, not the graph metric.
pub fn product_model(
    n: usize,
    local_terms: Vec<LocalTerm>,
    couplings: Vec<ProductCoupling>,
) -> Result<HamiltonianSpec> {
    let mut edges = std::collections::BTreeSet::new();
    for i in 0..n.saturating_sub(1) {
        edges.insert((i, i + 1));
    }
    for term in local_terms.iter().chain(couplings.iter().map(|c| &c.term)) {
        let s = term.support();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                edges.insert((s[i].min(s[j]), s[i].max(s[j])));
            }
        }
    }
    let graph = SpinGraph::new(n, edges.into_iter().collect(), None)?;
    let mut terms = local_terms;
    terms.extend(couplings.into_iter().map(|c| c.term));
    HamiltonianSpec::new(graph, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_chain, build_toric_code_layout};
    use approx::assert_relative_eq;
    use faer::Side;

    #[test]
    fn schedule_values_and_bounds() {
        let s = Schedule::piecewise(vec![0.0, 1.0, 2.5], vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(s.value(-0.1), 0.0);
        assert_eq!(s.value(0.0), 1.0);
        assert_eq!(s.value(1.7), -2.0);
        assert_eq!(s.value(3.0), 0.5);
        assert_eq!(s.bound(), 2.0);
        assert_eq!(s.breakpoints_in(0.0, 2.0), vec![1.0]);
        // Sampled |r(t)| never exceeds the recorded bound.
        for i in 0..100 {
            let t = -1.0 + 0.05 * i as f64;
            assert!(s.value(t).abs() <= s.bound());
        }
    }

    #[test]
    fn tfim_term_counts_and_g() {
        let g2 = build_chain(2, false).unwrap();
        let h = build_tfim(&g2, 1.0, 0.0).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_relative_eq!(h.terms()[0].base_norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(h.coupling_strength(), 1.0, epsilon = 1e-12);

        let h = build_tfim(&g2, 0.0, 1.0).unwrap();
        assert_eq!(h.terms().len(), 2); // n single-site terms
        let h = build_tfim(&g2, -2.0, 0.5).unwrap();
        assert_relative_eq!(h.coupling_strength(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn tfim_three_site_ground_energy_oracle() {
        // Dense eigensolver oracle for the n = 3 open chain at J = h = 1.
        let g = build_chain(3, false).unwrap();
        let h = build_tfim(&g, 1.0, 1.0).unwrap();
        let m = h.assemble_dense(0.0).unwrap();
        let evs = m.self_adjoint_eigenvalues(Side::Lower).unwrap();
        assert!((evs[0] - (-3.4940)).abs() < 1e-3, "ground energy {}", evs[0]);
    }

    #[test]
    fn heisenberg_two_site_spectrum() {
        let g = build_chain(2, false).unwrap();
        let h = build_heisenberg(&g, 1.0).unwrap();
        let m = h.assemble_dense(0.0).unwrap();
        let evs = m.self_adjoint_eigenvalues(Side::Lower).unwrap();
        let expect = [-3.0, 1.0, 1.0, 1.0];
        for (a, b) in evs.iter().zip(expect) {
            assert_relative_eq!(*a, b, epsilon = 1e-10);
        }
        // Singlet ground state: antisymmetric combination of |01>, |10>.
        let e = m.self_adjoint_eigen(Side::Lower).unwrap();
        let gs = e.U().col(0);
        assert!(gs[0].norm() < 1e-10 && gs[3].norm() < 1e-10);
        assert!((gs[1] + gs[2]).norm() < 1e-10);

        let h = build_heisenberg(&g, 0.0).unwrap();
        assert!(h.terms().is_empty());
    }

    #[test]
    fn assembled_matrix_is_hermitian_and_matches_matvec() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let g = build_chain(6, false).unwrap();
        let h = build_tfim(&g, 0.7, 1.3).unwrap();
        let m = h.assemble_dense(0.0).unwrap();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                assert!((m[(i, j)] - m[(j, i)].conj()).norm() < 1e-12);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<C64> = (0..m.nrows())
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut y = vec![C64::ZERO; x.len()];
        h.matvec(0.0, &x, &mut y).unwrap();
        for i in 0..x.len() {
            let mut dense = C64::ZERO;
            for j in 0..x.len() {
                dense += m[(i, j)] * x[j];
            }
            assert!((dense - y[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_schedule_assembles_to_zero() {
        let g = build_chain(3, false).unwrap();
        let zz = DenseOperator::pauli_z(0).product(&DenseOperator::pauli_z(1)).unwrap();
        let term = LocalTerm::new(zz, Schedule::constant(0.0), TermKind::Local).unwrap();
        let h = HamiltonianSpec::new(g, vec![term]).unwrap();
        let m = h.assemble_dense(0.0).unwrap();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                assert_eq!(m[(i, j)], C64::ZERO);
            }
        }
    }

    #[test]
    fn g_matches_brute_force_time_grid() {
        let g = build_chain(3, false).unwrap();
        let zz = DenseOperator::pauli_z(0).product(&DenseOperator::pauli_z(1)).unwrap();
        let sched = Schedule::piecewise(vec![0.0, 0.4, 0.9], vec![0.3, -1.7, 0.2]).unwrap();
        let term = LocalTerm::new(zz, sched, TermKind::Local).unwrap();
        let x = LocalTerm::new(
            DenseOperator::pauli_x(2).scale(C64::new(0.9, 0.0)),
            Schedule::constant(1.0),
            TermKind::Local,
        )
        .unwrap();
        let h = HamiltonianSpec::new(g, vec![term, x]).unwrap();
        let sampled = h.coupling_strength_sampled(0.0, 2.0, 1000);
        assert!((h.coupling_strength() - sampled).abs() < 1e-9);
    }

    #[test]
    fn tfim_spectrum_invariant_under_global_spin_flip() {
        let g = build_chain(3, false).unwrap();
        let h = build_tfim(&g, 1.0, 0.7).unwrap();
        let m = h.assemble_dense(0.0).unwrap();
        let flip = kron_flip(3);
        let conj = &flip * &m * &flip;
        let a = m.self_adjoint_eigenvalues(Side::Lower).unwrap();
        let b = conj.self_adjoint_eigenvalues(Side::Lower).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    fn kron_flip(n: usize) -> Mat<C64> {
        // prod_i X_i permutes basis states by complementing all bits.
        let dim = 1usize << n;
        Mat::from_fn(dim, dim, |i, j| if i == (dim - 1 - j) { C64::ONE } else { C64::ZERO })
    }

    #[test]
    fn toric_code_ground_pair() {
        let layout = build_toric_code_layout(2, 2).unwrap();
        let (spec, basis) = build_toric_code(&layout).unwrap();
        assert_eq!(spec.n_qubits(), 8);
        assert_eq!(spec.terms().len(), 8);
        assert_relative_eq!(spec.coupling_strength(), 1.0, epsilon = 1e-12);

        let (g1, g2) = &basis.pair;
        // Orthonormal logical pair (Gram matrix oracle).
        assert!((g1.inner(g1).re - 1.0).abs() < 1e-12);
        assert!((g2.inner(g2).re - 1.0).abs() < 1e-12);
        assert!(g1.inner(g2).norm() < 1e-12);

        // Every star and plaquette stabilizes both states.
        for op in basis.star_ops.iter().chain(&basis.plaquette_ops) {
            for s in [g1, g2] {
                let ev = s.expectation(op).unwrap();
                assert!((ev.re - 1.0).abs() < 1e-10 && ev.im.abs() < 1e-12);
            }
        }

        // Ground energy is -(number of stabilizers).
        let m = spec.assemble_dense(0.0).unwrap();
        let evs = m.self_adjoint_eigenvalues(Side::Lower).unwrap();
        assert_relative_eq!(evs[0], -8.0, epsilon = 1e-10);
        for s in [g1, g2] {
            let mut hv = vec![C64::ZERO; s.dim()];
            spec.matvec(0.0, s.amplitudes(), &mut hv).unwrap();
            let e: C64 = s
                .amplitudes()
                .iter()
                .zip(&hv)
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert_relative_eq!(e.re, -8.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn toric_ground_space_dimension_is_four() {
        // Projector-rank oracle: trace of prod (1+A_s)/2 * prod (1+B_p)/2.
        let layout = build_toric_code_layout(2, 2).unwrap();
        let (_, basis) = build_toric_code(&layout).unwrap();
        let n = 8;
        let dim = 1usize << n;
        let mut proj = Mat::<C64>::identity(dim, dim);
        for op in basis.star_ops.iter().chain(&basis.plaquette_ops) {
            let full = crate::quantum::kron_embed(op, n).unwrap();
            let half = (Mat::<C64>::identity(dim, dim) + full.matrix())
                * faer::Scale(C64::new(0.5, 0.0));
            proj = &proj * &half;
        }
        let mut trace = C64::ZERO;
        for i in 0..dim {
            trace += proj[(i, i)];
        }
        assert_relative_eq!(trace.re, 4.0, epsilon = 1e-8);
    }

    #[test]
    fn toric_size_limit() {
        let layout = build_toric_code_layout(3, 3).unwrap();
        assert!(matches!(
            build_toric_code(&layout),
            Err(Error::Capability { .. })
        ));
    }

    #[test]
    fn product_coupling_norm_gate() {
        let x0 = DenseOperator::pauli_x(0);
        let x1 = DenseOperator::pauli_x(1);
        let c = build_product_coupling(&x0, &x1, Schedule::constant(1.0)).unwrap();
        assert_relative_eq!(c.term().base_norm(), 1.0, epsilon = 1e-12);

        let too_big = x0.scale(C64::new(2.0, 0.0));
        assert!(build_product_coupling(&too_big, &x1, Schedule::constant(1.0)).is_err());
    }

    #[test]
    fn rescaled_schedule_identity() {
        let s = Schedule::piecewise(vec![0.0, 1.0], vec![0.5, -0.5]).unwrap();
        let r = s.rescale(2.0);
        // r'(t) = 2 r(2t).
        assert_eq!(r.value(0.25), 1.0);
        assert_eq!(r.value(0.75), -1.0);
    }
}
