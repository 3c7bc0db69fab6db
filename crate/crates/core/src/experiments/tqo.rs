//! Topological-order accuracy: worst-case local distinguishability of an
//! orthonormal state pair over all small-diameter connected regions.

use super::grid::ExperimentResult;
use crate::error::{Error, Result};
use crate::lattice::SpinGraph;
use crate::quantum::{partial_trace_state, trace_norm, transition_matrix, PureState};

/// Default cap on region size; trace norms on larger regions get costly.
pub const DEFAULT_REGION_CAP: usize = 10;

/// Worst-case local errors per support diameter.
///
/// eps_diag(l) = max over regions S with diam <= l of
///   (1/2) || rho1_S - rho2_S ||_1   (largest expectation difference / 2),
/// eps_offdiag(l) = max || Tr_env |psi2><psi1| ||_1  (largest cross term),
/// eps(l) = max of both; nondecreasing in l by construction.
#[derive(Debug, Clone)]
pub struct TqoReport {
    pub l_values: Vec<usize>,
    pub eps_diag: Vec<f64>,
    pub eps_offdiag: Vec<f64>,
    pub eps: Vec<f64>,
    pub regions_scanned: usize,
    pub region_cap: usize,
}

impl TqoReport {
    /// eps at the largest scanned diameter.
    pub fn eps_at(&self, l: usize) -> Option<f64> {
        self.l_values.iter().position(|&x| x == l).map(|i| self.eps[i])
    }

    pub fn as_result(&self) -> ExperimentResult {
        let mut res = ExperimentResult::new("tqo", &["l", "series"]);
        for (i, &l) in self.l_values.iter().enumerate() {
            res.push(vec![l as f64, 0.0], self.eps[i], None);
            res.push(vec![l as f64, 1.0], self.eps_diag[i], None);
            res.push(vec![l as f64, 2.0], self.eps_offdiag[i], None);
        }
        res.meta("regions_scanned", self.regions_scanned);
        res.meta("region_cap", self.region_cap);
        res
    }
}

/// Scan every connected region of diameter <= l (size capped) and report
/// the exact worst-case diagonal and off-diagonal errors; the trace-norm
/// maximizer makes observable sampling unnecessary.
pub fn tqo_accuracy(
    psi1: &PureState,
    psi2: &PureState,
    l: usize,
    graph: &SpinGraph,
    region_cap: usize,
) -> Result<TqoReport> {
    if psi1.n_qubits() != psi2.n_qubits() {
        return Err(Error::Dimension {
            context: "tqo_accuracy",
            expected: psi1.n_qubits(),
            found: psi2.n_qubits(),
        });
    }
    if graph.n_vertices() != psi1.n_qubits() {
        return Err(Error::Dimension {
            context: "tqo_accuracy graph",
            expected: psi1.n_qubits(),
            found: graph.n_vertices(),
        });
    }
    let overlap = psi1.inner(psi2).norm();
    if overlap > 1e-10 {
        return Err(Error::domain(format!(
            "tqo_accuracy needs an orthonormal pair, |<psi1|psi2>| = {overlap:.3e}"
        )));
    }
    if l == 0 {
        return Err(Error::domain("diameter bound l must be at least 1"));
    }
    let cap = region_cap.min(graph.n_vertices());
    let dist = graph.all_pairs_distances();
    let regions = connected_subsets(graph, cap);

    let mut diag_by_l = vec![0.0f64; l + 1];
    let mut offdiag_by_l = vec![0.0f64; l + 1];
    let mut scanned = 0usize;
    for region in &regions {
        let dist = &dist;
        let diam = region
            .iter()
            .flat_map(|&u| region.iter().map(move |&v| dist[u][v]))
            .max()
            .unwrap_or(0);
        if diam > l {
            continue;
        }
        scanned += 1;
        let rho1 = partial_trace_state(psi1, region)?;
        let rho2 = partial_trace_state(psi2, region)?;
        let eps_d = 0.5 * rho1.trace_distance(&rho2)?;
        let x = transition_matrix(psi1, psi2, region)?;
        let eps_o = trace_norm(x.matrix());
        let slot = diam.max(1); // singletons count toward every l >= 1
        diag_by_l[slot] = diag_by_l[slot].max(eps_d);
        offdiag_by_l[slot] = offdiag_by_l[slot].max(eps_o);
    }

    let mut l_values = Vec::with_capacity(l);
    let mut eps_diag = Vec::with_capacity(l);
    let mut eps_offdiag = Vec::with_capacity(l);
    let mut eps = Vec::with_capacity(l);
    let (mut run_d, mut run_o) = (0.0f64, 0.0f64);
    for lv in 1..=l {
        run_d = run_d.max(diag_by_l[lv]);
        run_o = run_o.max(offdiag_by_l[lv]);
        l_values.push(lv);
        eps_diag.push(run_d);
        eps_offdiag.push(run_o);
        eps.push(run_d.max(run_o));
    }
    Ok(TqoReport { l_values, eps_diag, eps_offdiag, eps, regions_scanned: scanned, region_cap: cap })
}

/// All connected vertex subsets of size <= cap, each exactly once
/// (ESU-style enumeration with exclusive extension sets).
pub(crate) fn connected_subsets(graph: &SpinGraph, cap: usize) -> Vec<Vec<usize>> {
    assert!(graph.n_vertices() <= 64, "bitmask enumeration supports up to 64 vertices");
    let n = graph.n_vertices();
    let nbr: Vec<u64> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
        .collect();
    let mut out = Vec::new();
    for v in 0..n {
        let above = !((1u64 << (v + 1)) - 1); // vertices strictly greater than v
        let sub = 1u64 << v;
        let ext = nbr[v] & above;
        extend(sub, ext, v, cap, &nbr, above, &mut out);
    }
    out
}

fn extend(sub: u64, ext: u64, root: usize, cap: usize, nbr: &[u64], above: u64, out: &mut Vec<Vec<usize>>) {
    out.push(mask_to_vec(sub));
    if sub.count_ones() as usize >= cap {
        return;
    }
    let mut remaining = ext;
    // Closed neighborhood of the current subgraph, for exclusive extension.
    let mut reach = sub;
    let mut bits = sub;
    while bits != 0 {
        let v = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        reach |= nbr[v];
    }
    while remaining != 0 {
        let w = remaining.trailing_zeros() as usize;
        remaining &= remaining - 1;
        let exclusive = nbr[w] & above & !reach & !(1 << w);
        extend(sub | (1 << w), remaining | exclusive, root, cap, nbr, above, out);
    }
}

fn mask_to_vec(mask: u64) -> Vec<usize> {
    let mut v = Vec::with_capacity(mask.count_ones() as usize);
    let mut bits = mask;
    while bits != 0 {
        v.push(bits.trailing_zeros() as usize);
        bits &= bits - 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_toric_code;
    use crate::lattice::{build_chain, build_toric_code_layout, build_torus_2d};
    use crate::quantum::apply_local;
    use crate::quantum::DenseOperator;
    use crate::C64;

    /// Brute-force oracle: every subset, connectivity by BFS.
    fn brute_force_connected(graph: &SpinGraph, cap: usize) -> std::collections::BTreeSet<Vec<usize>> {
        let n = graph.n_vertices();
        let mut out = std::collections::BTreeSet::new();
        for mask in 1u64..(1 << n) {
            let verts = mask_to_vec(mask);
            if verts.len() > cap {
                continue;
            }
            // BFS within the subset.
            let mut seen = vec![verts[0]];
            let mut queue = vec![verts[0]];
            while let Some(u) = queue.pop() {
                for &w in graph.neighbors(u) {
                    if verts.contains(&w) && !seen.contains(&w) {
                        seen.push(w);
                        queue.push(w);
                    }
                }
            }
            if seen.len() == verts.len() {
                out.insert(verts);
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_brute_force_oracle() {
        for graph in [build_chain(6, true).unwrap(), build_torus_2d(2, 3).unwrap()] {
            for cap in [1, 2, 3, 6] {
                let fast: std::collections::BTreeSet<Vec<usize>> =
                    connected_subsets(&graph, cap).into_iter().collect();
                let slow = brute_force_connected(&graph, cap);
                assert_eq!(fast.len(), connected_subsets(&graph, cap).len(), "duplicates emitted");
                assert_eq!(fast, slow, "cap {cap}");
            }
        }
    }

    #[test]
    fn ghz_pair_is_maximally_off_diagonal() {
        let g = build_chain(6, false).unwrap();
        let report = tqo_accuracy(
            &PureState::ghz(6),
            &PureState::ghz_minus(6),
            2,
            &g,
            DEFAULT_REGION_CAP,
        )
        .unwrap();
        // Identical reduced states, unit off-diagonal detectability.
        assert!(report.eps_diag[0] < 1e-10);
        assert!((report.eps_offdiag[0] - 1.0).abs() < 1e-10);
        assert!((report.eps[0] - 1.0).abs() < 1e-10);
        // Nondecreasing in l.
        for w in report.eps.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn locally_distinguishable_pair_detected_at_l_one() {
        let g = build_chain(5, false).unwrap();
        let psi1 = PureState::zero_state(5);
        let flipped = apply_local(&psi1, &DenseOperator::pauli_x(2)).unwrap();
        let psi2 = PureState::new(5, flipped).unwrap();
        let report = tqo_accuracy(&psi1, &psi2, 1, &g, DEFAULT_REGION_CAP).unwrap();
        assert!(report.eps[0] >= 0.5, "local flip must be visible, eps = {}", report.eps[0]);
    }

    #[test]
    fn toric_ground_pair_is_locally_indistinguishable() {
        let layout = build_toric_code_layout(2, 2).unwrap();
        let (_, basis) = build_toric_code(&layout).unwrap();
        let (g1, g2) = &basis.pair;
        let report = tqo_accuracy(g1, g2, 1, &layout.qubit_graph, DEFAULT_REGION_CAP).unwrap();
        assert!(report.eps[0] < 1e-10, "toric pair leaked locally: {}", report.eps[0]);
        assert!(report.regions_scanned > 8);
    }

    #[test]
    fn non_orthogonal_pair_rejected() {
        let g = build_chain(3, false).unwrap();
        let psi = PureState::ghz(3);
        assert!(tqo_accuracy(&psi, &psi, 1, &g, 4).is_err());
    }

    #[test]
    fn stabilizer_reduced_state_oracle_toric() {
        // Independent check of the l = 1 result: single-qubit marginals of
        // both toric ground states are maximally mixed, so eps_diag on
        // singletons must vanish and the transition matrix must vanish.
        let layout = build_toric_code_layout(2, 2).unwrap();
        let (_, basis) = build_toric_code(&layout).unwrap();
        let (g1, g2) = &basis.pair;
        for q in 0..8 {
            let r1 = partial_trace_state(g1, &[q]).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let expect = if i == j { C64::new(0.5, 0.0) } else { C64::ZERO };
                    assert!((r1.matrix()[(i, j)] - expect).norm() < 1e-10);
                }
            }
            let x = transition_matrix(g1, g2, &[q]).unwrap();
            assert!(trace_norm(x.matrix()) < 1e-10);
        }
    }
}
