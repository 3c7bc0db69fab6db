//! Commutator light-cone scans and the (v, xi) fit.

use super::grid::{ExperimentResult, ScanGrid};
use super::stats::least_squares;
use crate::error::{Error, Result};
use crate::evolution::{heisenberg_apply, PathSelect, Propagator, PropagatorPlan};
use crate::hamiltonian::HamiltonianSpec;
use crate::quantum::{
    self_adjoint_norm, operator_norm_power, DenseOperator, PowerIterOptions,
};
use crate::C64;
use faer::Mat;
use rayon::prelude::*;

/// Dense Heisenberg scans hold 2^n x 2^n matrices; beyond this the scan
/// switches to the matrix-free commutator action.
pub const SCAN_DENSE_LIMIT: usize = 10;
pub const SCAN_MATFREE_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanPath {
    #[default]
    Auto,
    Dense,
    MatrixFree,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOpts {
    pub plan: PropagatorPlan,
    /// Vertex anchoring observable A.
    pub anchor: usize,
    pub path: ScanPath,
    pub power: PowerIterOptions,
}

impl ScanOpts {
    pub fn new(plan: PropagatorPlan) -> Self {
        ScanOpts { plan, anchor: 0, path: ScanPath::Auto, power: PowerIterOptions::default() }
    }
}

/// C(L, t) = || [O_A(t), O_B(0)] || table.
#[derive(Debug, Clone)]
pub struct CommutatorTable {
    pub l_values: Vec<usize>,
    pub t_values: Vec<f64>,
    /// values[ti][li].
    pub values: Vec<Vec<f64>>,
    /// B-site vertex per L entry.
    pub b_sites: Vec<usize>,
}

impl CommutatorTable {
    pub fn value(&self, ti: usize, li: usize) -> f64 {
        self.values[ti][li]
    }

    /// Row at the given time index as (L, C) pairs.
    pub fn row(&self, ti: usize) -> Vec<(usize, f64)> {
        self.l_values.iter().copied().zip(self.values[ti].iter().copied()).collect()
    }

    pub fn as_result(&self) -> ExperimentResult {
        let mut res = ExperimentResult::new("lightcone", &["L", "t"]);
        for (ti, &t) in self.t_values.iter().enumerate() {
            for (li, &l) in self.l_values.iter().enumerate() {
                res.push(vec![l as f64, t], self.values[ti][li], None);
            }
        }
        res
    }
}

/// Scan the commutator norm over the (L, t) grid. Observable A sits at
/// the anchor vertex; B(L) is the smallest-index vertex at graph
/// distance exactly L.
pub fn lightcone_scan(h: &HamiltonianSpec, grid: &ScanGrid, opts: &ScanOpts) -> Result<CommutatorTable> {
    let n = h.n_qubits();
    let path = match opts.path {
        ScanPath::Auto => {
            if n <= SCAN_DENSE_LIMIT {
                ScanPath::Dense
            } else if n <= SCAN_MATFREE_LIMIT {
                ScanPath::MatrixFree
            } else {
                return Err(Error::Capability {
                    what: "lightcone_scan",
                    requested: n,
                    limit: SCAN_MATFREE_LIMIT,
                });
            }
        }
        ScanPath::Dense if n > SCAN_DENSE_LIMIT => {
            return Err(Error::Capability {
                what: "lightcone_scan (dense)",
                requested: n,
                limit: SCAN_DENSE_LIMIT,
            })
        }
        ScanPath::MatrixFree if n > SCAN_MATFREE_LIMIT => {
            return Err(Error::Capability {
                what: "lightcone_scan (matrix-free)",
                requested: n,
                limit: SCAN_MATFREE_LIMIT,
            })
        }
        p => p,
    };
    if opts.anchor >= n {
        return Err(Error::domain(format!("anchor vertex {} outside graph", opts.anchor)));
    }
    let dist = h.graph().distances_from(&[opts.anchor]);
    let mut b_sites = Vec::with_capacity(grid.l_values.len());
    for &l in &grid.l_values {
        let site = (0..n).find(|&v| dist[v] == l).ok_or_else(|| {
            Error::domain(format!("no vertex at distance {l} from anchor {}", opts.anchor))
        })?;
        b_sites.push(site);
    }
    let op_a = grid.obs_a.operator(opts.anchor);

    let values = match path {
        ScanPath::Dense => dense_scan(h, grid, &op_a, &b_sites, opts)?,
        ScanPath::MatrixFree => matfree_scan(h, grid, &op_a, &b_sites, opts)?,
        ScanPath::Auto => unreachable!(),
    };
    Ok(CommutatorTable {
        l_values: grid.l_values.clone(),
        t_values: grid.t_values.clone(),
        values,
        b_sites,
    })
}

fn dense_scan(
    h: &HamiltonianSpec,
    grid: &ScanGrid,
    op_a: &DenseOperator,
    b_sites: &[usize],
    opts: &ScanOpts,
) -> Result<Vec<Vec<f64>>> {
    let n = h.n_qubits();
    let mut prop = Propagator::new(h, PathSelect::Dense)?;
    let mut values = Vec::with_capacity(grid.t_values.len());
    for &t in &grid.t_values {
        let u = prop.unitary(0.0, t, opts.plan.dt)?;
        // M = U† (O_A ⊗ 1) U, using the locality of O_A on the left.
        let au = left_mul_local(op_a, n, &u);
        let m = u.adjoint() * au;
        // One commutator norm per L; independent, reduced in grid order.
        let row: Vec<f64> = b_sites
            .par_iter()
            .map(|&site| {
                let op_b = grid.obs_b.operator(site);
                let mb = right_mul_local(&m, &op_b, n);
                let bm = left_mul_local(&op_b, n, &m);
                // i [M, O_B] is Hermitian for Hermitian M, O_B.
                let mut comm = mb;
                comm -= &bm;
                let i_comm = comm * faer::Scale(C64::new(0.0, 1.0));
                self_adjoint_norm(&i_comm)
            })
            .collect();
        values.push(row);
    }
    Ok(values)
}

fn matfree_scan(
    h: &HamiltonianSpec,
    grid: &ScanGrid,
    op_a: &DenseOperator,
    b_sites: &[usize],
    opts: &ScanOpts,
) -> Result<Vec<Vec<f64>>> {
    let n = h.n_qubits();
    let dim = 1usize << n;
    let points: Vec<(usize, usize)> = (0..grid.t_values.len())
        .flat_map(|ti| (0..b_sites.len()).map(move |li| (ti, li)))
        .collect();
    let results: Vec<Result<f64>> = points
        .par_iter()
        .map(|&(ti, li)| {
            let t = grid.t_values[ti];
            let op_b = grid.obs_b.operator(b_sites[li]);
            let plan = opts.plan;
            let commutator = |x: &[C64]| -> Result<Vec<C64>> {
                // [M, O_B] x with M = O_A(t).
                let mut bx = vec![C64::ZERO; dim];
                crate::quantum::apply_term_raw(&op_b, n, x, &mut bx, C64::ONE, false);
                let m_bx = heisenberg_apply(h, op_a, t, &bx, &plan)?;
                let mx = heisenberg_apply(h, op_a, t, x, &plan)?;
                let mut b_mx = vec![C64::ZERO; dim];
                crate::quantum::apply_term_raw(&op_b, n, &mx, &mut b_mx, C64::ONE, false);
                Ok(m_bx.iter().zip(&b_mx).map(|(a, b)| a - b).collect())
            };
            // The commutator of Hermitian operators is anti-Hermitian:
            // adjoint action is the negation.
            let mut power = opts.power;
            power.seed = opts.power.seed ^ ((ti as u64) << 32 | li as u64);
            operator_norm_power(
                dim,
                |x, y| {
                    let r = commutator(x).expect("propagation failed in power iteration");
                    y.copy_from_slice(&r);
                },
                |x, y| {
                    let r = commutator(x).expect("propagation failed in power iteration");
                    for (yi, ri) in y.iter_mut().zip(&r) {
                        *yi = -ri;
                    }
                },
                power,
            )
        })
        .collect();
    let mut values = vec![vec![0.0; b_sites.len()]; grid.t_values.len()];
    for ((ti, li), r) in points.into_iter().zip(results) {
        values[ti][li] = r?;
    }
    Ok(values)
}

/// (op ⊗ 1) M: apply the local operator to each column.
pub(crate) fn left_mul_local(op: &DenseOperator, n: usize, m: &Mat<C64>) -> Mat<C64> {
    let dim = m.nrows();
    let mut out = Mat::<C64>::zeros(dim, dim);
    let mut buf = vec![C64::ZERO; dim];
    for j in 0..dim {
        let col = m.col_as_slice(j);
        crate::quantum::apply_term_raw(op, n, col, &mut buf, C64::ONE, false);
        out.col_as_slice_mut(j).copy_from_slice(&buf);
    }
    out
}

/// M (op ⊗ 1): mix columns according to the local operator.
pub(crate) fn right_mul_local(m: &Mat<C64>, op: &DenseOperator, n: usize) -> Mat<C64> {
    let dim = m.nrows();
    let indexer = crate::quantum::indexer_for(op.support(), n);
    let subs = indexer.sub_table();
    let d = indexer.sub_dim();
    let mut out = Mat::<C64>::zeros(dim, dim);
    for env in 0..indexer.env_dim() {
        let base = indexer.spread_env(env);
        for (b, &off_b) in subs.iter().enumerate() {
            let j_out = base | off_b;
            let out_col = out.col_as_slice_mut(j_out);
            for (bp, &off_bp) in subs.iter().enumerate() {
                let w = op.matrix()[(bp, b)];
                if w == C64::ZERO {
                    continue;
                }
                let src = m.col_as_slice(base | off_bp);
                for i in 0..dim {
                    out_col[i] += src[i] * w;
                }
            }
        }
        let _ = d;
    }
    out
}

/// Fitted counterparts of (v, xi) extracted from a commutator table.
#[derive(Debug, Clone)]
pub struct LightconeFit {
    pub v_est: f64,
    pub xi_est: f64,
    pub theta: f64,
    /// (L, t*) arrival pairs that entered the velocity fit.
    pub arrivals: Vec<(usize, f64)>,
    /// L values where the threshold was never crossed.
    pub excluded: Vec<usize>,
    pub v_rms: f64,
    pub xi_rms: f64,
    /// False when an arrival time decreased with L.
    pub monotone_arrivals: bool,
}

/// Smallest L used by the fits; shorter distances carry transients that
/// the asymptotic light-cone form does not describe.
pub const FIT_MIN_L: usize = 3;

/// Arrival-time and tail fits: t*(L) is the first (interpolated) time
/// the commutator reaches theta; v = 1/slope of t*(L); xi = -1/slope of
/// ln C vs L at the table's largest time.
pub fn fit_lightcone(table: &CommutatorTable, theta: f64) -> Result<LightconeFit> {
    let max_c = table
        .values
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |m, &v| m.max(v));
    if !(theta > 0.0 && theta < max_c) {
        return Err(Error::Fit(format!(
            "threshold {theta} outside the table range (0, {max_c})"
        )));
    }
    let mut arrivals = Vec::new();
    let mut excluded = Vec::new();
    for (li, &l) in table.l_values.iter().enumerate() {
        let mut found = None;
        for (ti, &t) in table.t_values.iter().enumerate() {
            let c = table.values[ti][li];
            if c >= theta {
                // Interpolate from the previous grid point (or from C(0) = 0).
                let (t_prev, c_prev) = if ti == 0 {
                    (0.0, 0.0)
                } else {
                    (table.t_values[ti - 1], table.values[ti - 1][li])
                };
                let frac = if c > c_prev { (theta - c_prev) / (c - c_prev) } else { 1.0 };
                found = Some(t_prev + frac * (t - t_prev));
                break;
            }
        }
        match found {
            Some(t_star) => arrivals.push((l, t_star)),
            None => excluded.push(l),
        }
    }
    if arrivals.is_empty() {
        return Err(Error::Fit("threshold never crossed at any L".into()));
    }
    let monotone_arrivals = arrivals.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12);

    let v_points: Vec<(f64, f64)> = arrivals
        .iter()
        .filter(|(l, _)| *l >= FIT_MIN_L)
        .map(|&(l, t)| (l as f64, t))
        .collect();
    let v_fit = least_squares(&v_points)?;
    if v_fit.slope <= 0.0 {
        return Err(Error::Fit(format!("arrival slope {} is not positive", v_fit.slope)));
    }
    let v_est = 1.0 / v_fit.slope;

    let last = table.t_values.len() - 1;
    let xi_points: Vec<(f64, f64)> = table
        .l_values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l >= FIT_MIN_L)
        .filter(|(li, _)| table.values[last][*li] > 1e-300)
        .map(|(li, &l)| (l as f64, table.values[last][li].ln()))
        .collect();
    let xi_fit = least_squares(&xi_points)?;
    if xi_fit.slope >= 0.0 {
        return Err(Error::Fit(format!(
            "tail slope {} is not negative; largest time sits inside the cone",
            xi_fit.slope
        )));
    }
    let xi_est = -1.0 / xi_fit.slope;

    Ok(LightconeFit {
        v_est,
        xi_est,
        theta,
        arrivals,
        excluded,
        v_rms: v_fit.rms,
        xi_rms: xi_fit.rms,
        monotone_arrivals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::grid::Pauli;
    use crate::hamiltonian::build_tfim;
    use crate::lattice::build_chain;

    fn synthetic_table(v: f64, xi: f64) -> CommutatorTable {
        // Pure light-cone form C = exp(-(L - v t)/xi).
        let l_values: Vec<usize> = (1..=8).collect();
        let t_values: Vec<f64> = (1..=40).map(|i| 0.1 * i as f64).collect();
        let values = t_values
            .iter()
            .map(|&t| {
                l_values
                    .iter()
                    .map(|&l| (-(l as f64 - v * t) / xi).exp())
                    .collect()
            })
            .collect();
        CommutatorTable { l_values: l_values.clone(), t_values, values, b_sites: l_values }
    }

    #[test]
    fn fit_recovers_synthetic_parameters() {
        let fit = fit_lightcone(&synthetic_table(2.0, 1.5), 0.5).unwrap();
        assert!((fit.v_est - 2.0).abs() / 2.0 < 0.05, "v_est {}", fit.v_est);
        assert!((fit.xi_est - 1.5).abs() / 1.5 < 0.05, "xi_est {}", fit.xi_est);
        assert!(fit.monotone_arrivals);
        assert!(fit.excluded.is_empty());
    }

    #[test]
    fn threshold_above_table_max_is_error() {
        let t = synthetic_table(2.0, 1.5);
        assert!(matches!(fit_lightcone(&t, 1e6), Err(Error::Fit(_))));
    }

    #[test]
    fn scan_commutator_vanishes_at_t_zero() {
        let g = build_chain(6, false).unwrap();
        let h = build_tfim(&g, 1.0, 1.0).unwrap();
        let grid = ScanGrid::new(vec![2, 4], vec![1e-9], Pauli::Z, Pauli::Z).unwrap();
        let opts = ScanOpts::new(PropagatorPlan::to_time(1.0).unwrap());
        let table = lightcone_scan(&h, &grid, &opts).unwrap();
        for row in &table.values {
            for &v in row {
                assert!(v < 1e-8, "commutator at t ~ 0 should vanish, got {v}");
            }
        }
    }

    #[test]
    fn small_t_series_expansion_oracle() {
        // Taylor oracle: Z0(t) = sum (it)^k/k! ad_H^k(Z0), so the leading
        // commutator order is the first k with [ad_H^k(Z0), Z1] nonzero.
        // For the adjacent Z-Z pair of the transverse-field Ising chain
        // that happens at k = 3 (the k = 1, 2 terms vanish identically).
        let g = build_chain(2, false).unwrap();
        let h = build_tfim(&g, 1.0, 1.0).unwrap();
        let hm = h.assemble_dense(0.0).unwrap();
        let z0 = crate::quantum::kron_embed(&DenseOperator::pauli_z(0), 2).unwrap();
        let z1 = crate::quantum::kron_embed(&DenseOperator::pauli_z(1), 2).unwrap();
        let comm = |a: &Mat<C64>, b: &Mat<C64>| -> Mat<C64> { a * b - b * a };
        let mut nested = z0.matrix().clone();
        let mut order = 0usize;
        let mut factorial = 1.0;
        let series_coeff = loop {
            order += 1;
            factorial *= order as f64;
            nested = comm(&hm, &nested);
            let c = crate::quantum::operator_norm(&comm(&nested, z1.matrix())) / factorial;
            if c > 1e-10 {
                break c;
            }
            assert!(order < 6, "no commutator onset found");
        };
        assert_eq!(order, 3, "TFIM adjacent ZZ onset is cubic");

        let grid = ScanGrid::new(vec![1], vec![2e-3, 3e-3], Pauli::Z, Pauli::Z).unwrap();
        let opts = ScanOpts::new(PropagatorPlan::to_time(1.0).unwrap());
        let table = lightcone_scan(&h, &grid, &opts).unwrap();
        for (ti, &t) in table.t_values.iter().enumerate() {
            let measured = table.values[ti][0];
            let predicted = series_coeff * t.powi(order as i32);
            assert!(
                (measured - predicted).abs() / predicted < 0.02,
                "t = {t}: measured {measured}, series {predicted}"
            );
        }
    }

    #[test]
    fn dense_and_matfree_scans_agree() {
        let g = build_chain(6, false).unwrap();
        let h = build_tfim(&g, 1.0, 1.0).unwrap();
        let grid = ScanGrid::new(vec![2, 4], vec![0.4, 0.8], Pauli::Z, Pauli::Z).unwrap();
        let mut opts = ScanOpts::new(PropagatorPlan::to_time(1.0).unwrap());
        opts.path = ScanPath::Dense;
        let dense = lightcone_scan(&h, &grid, &opts).unwrap();
        opts.path = ScanPath::MatrixFree;
        let matfree = lightcone_scan(&h, &grid, &opts).unwrap();
        for ti in 0..grid.t_values.len() {
            for li in 0..grid.l_values.len() {
                let (a, b) = (dense.values[ti][li], matfree.values[ti][li]);
                assert!((a - b).abs() < 1e-6, "paths disagree at ({ti},{li}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn farther_commutator_is_smaller() {
        let g = build_chain(8, false).unwrap();
        let h = build_tfim(&g, 1.0, 1.0).unwrap();
        let grid = ScanGrid::new(vec![3, 7], vec![1.0], Pauli::Z, Pauli::Z).unwrap();
        let opts = ScanOpts::new(PropagatorPlan::to_time(1.0).unwrap());
        let table = lightcone_scan(&h, &grid, &opts).unwrap();
        assert!(table.values[0][1] < table.values[0][0]);
    }
}
