//! Entanglement generation under product couplings: entropy trajectories
//! against the c* rate budget and the perimeter law.

use super::grid::ExperimentResult;
use crate::bounds::{cstar, cstar_point};
use crate::error::{Error, Result};
use crate::evolution::{evolve_state, PropagatorPlan};
use crate::hamiltonian::{
    build_product_coupling, product_model, HamiltonianSpec, LocalTerm, Schedule, TermKind,
};
use crate::quantum::{partial_trace_state, DenseOperator, PureState};
use crate::C64;
use faer::Mat;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// S(rho_A(t)) trajectory with finite-difference rates and the
/// instantaneous budget c* sum_k |r_k(t)| over the crossing couplings.
#[derive(Debug, Clone)]
pub struct EntropyTrajectory {
    pub t_values: Vec<f64>,
    pub entropy_bits: Vec<f64>,
    /// Central-difference rates (Richardson-extrapolated); None at the
    /// first grid point, where the integrated budget is checked instead.
    pub rate_bits: Vec<Option<f64>>,
    /// Discrepancy between the two finite-difference stencils.
    pub rate_fd_error: Vec<Option<f64>>,
    pub budget_rate_bits: Vec<f64>,
}

impl EntropyTrajectory {
    pub fn as_result(&self) -> ExperimentResult {
        let mut res = ExperimentResult::new("entropy", &["t", "series"]);
        for (i, &t) in self.t_values.iter().enumerate() {
            res.push(vec![t, 0.0], self.entropy_bits[i], self.rate_fd_error[i]);
            res.push(vec![t, 1.0], self.budget_rate_bits[i], None);
            if let Some(r) = self.rate_bits[i] {
                res.push(vec![t, 2.0], r, self.rate_fd_error[i]);
            }
        }
        res
    }
}

/// Coupling terms crossing the A-cut. Every crossing term must be a
/// product coupling; the rate bound is only stated for that class.
fn crossing_budget(h: &HamiltonianSpec, region_a: &[usize]) -> Result<Vec<usize>> {
    let mut crossing = Vec::new();
    for (i, term) in h.terms().iter().enumerate() {
        if term.crosses(region_a) {
            if term.kind() != TermKind::Coupling {
                return Err(Error::domain(
                    "entropy_growth requires all cut-crossing terms to be product couplings",
                ));
            }
            crossing.push(i);
        }
    }
    Ok(crossing)
}

/// c* times the integrated |r_k| of the crossing couplings over [t0, t1].
pub fn integrated_budget_bits(
    h: &HamiltonianSpec,
    region_a: &[usize],
    t0: f64,
    t1: f64,
) -> Result<f64> {
    let crossing = crossing_budget(h, region_a)?;
    Ok(cstar()
        * crossing
            .iter()
            .map(|&i| h.terms()[i].schedule().integral_abs(t0, t1))
            .sum::<f64>())
}

pub fn entropy_growth(
    h: &HamiltonianSpec,
    psi0: &PureState,
    region_a: &[usize],
    t_values: &[f64],
    plan: &PropagatorPlan,
    fd_delta: Option<f64>,
) -> Result<EntropyTrajectory> {
    if t_values.is_empty() || !t_values.windows(2).all(|w| w[0] < w[1]) || t_values[0] < 0.0 {
        return Err(Error::domain("time grid must be nonnegative and strictly increasing"));
    }
    let crossing = crossing_budget(h, region_a)?;
    let delta = fd_delta.unwrap_or(plan.dt / 10.0);
    if delta <= 0.0 {
        return Err(Error::domain("finite-difference delta must be positive"));
    }
    for w in t_values.windows(2) {
        if w[1] - w[0] < 2.0 * delta {
            return Err(Error::domain("time grid spacing must exceed twice the fd delta"));
        }
    }

    // Sample times: the grid points plus the fd stencils around interior
    // points; the state is marched through them once, in order.
    #[derive(Clone, Copy)]
    struct Sample {
        t: f64,
        grid_index: Option<usize>,
        stencil: Option<(usize, i8)>, // (grid index, offset in units of delta/2: -2,-1,1,2)
    }
    let mut samples: Vec<Sample> = Vec::new();
    for (gi, &t) in t_values.iter().enumerate() {
        let interior = t - delta > 1e-12;
        if interior {
            samples.push(Sample { t: t - delta, grid_index: None, stencil: Some((gi, -2)) });
            samples.push(Sample { t: t - 0.5 * delta, grid_index: None, stencil: Some((gi, -1)) });
        }
        samples.push(Sample { t, grid_index: Some(gi), stencil: None });
        if interior {
            samples.push(Sample { t: t + 0.5 * delta, grid_index: None, stencil: Some((gi, 1)) });
            samples.push(Sample { t: t + delta, grid_index: None, stencil: Some((gi, 2)) });
        }
    }
    samples.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());

    let mut entropy_bits = vec![0.0; t_values.len()];
    let mut stencil_s = vec![[f64::NAN; 4]; t_values.len()];
    let mut state = psi0.clone();
    let mut t_prev = 0.0;
    for s in &samples {
        if s.t > t_prev + 1e-15 {
            let mut leg = *plan;
            leg.t_start = t_prev;
            leg.t_end = s.t;
            state = evolve_state(h, &state, &leg)?;
            t_prev = s.t;
        }
        let ent = partial_trace_state(&state, region_a)?.von_neumann_entropy()?;
        if let Some(gi) = s.grid_index {
            entropy_bits[gi] = ent;
        }
        if let Some((gi, off)) = s.stencil {
            let slot = match off {
                -2 => 0,
                -1 => 1,
                1 => 2,
                2 => 3,
                _ => unreachable!(),
            };
            stencil_s[gi][slot] = ent;
        }
    }

    let mut rate_bits = Vec::with_capacity(t_values.len());
    let mut rate_fd_error = Vec::with_capacity(t_values.len());
    let mut budget_rate_bits = Vec::with_capacity(t_values.len());
    let cs = cstar();
    for (gi, &t) in t_values.iter().enumerate() {
        let budget: f64 = crossing
            .iter()
            .map(|&i| h.terms()[i].schedule().value(t).abs())
            .sum();
        budget_rate_bits.push(cs * budget);
        let st = stencil_s[gi];
        if st.iter().any(|v| v.is_nan()) {
            rate_bits.push(None);
            rate_fd_error.push(None);
        } else {
            let coarse = (st[3] - st[0]) / (2.0 * delta);
            let fine = (st[2] - st[1]) / delta;
            // Richardson extrapolation of the central difference.
            rate_bits.push(Some((4.0 * fine - coarse) / 3.0));
            rate_fd_error.push(Some((fine - coarse).abs()));
        }
    }
    Ok(EntropyTrajectory { t_values: t_values.to_vec(), entropy_bits, rate_bits, rate_fd_error, budget_rate_bits })
}

/// The two-qubit input maximizing the initial entangling rate of an
/// X ⊗ X coupling: sqrt(1-x*)|00> + i sqrt(x*)|11> with x* the
/// maximizer of the entangling-rate objective. The returned rate is c*.
pub fn xx_optimal_input() -> (PureState, f64) {
    let (x_star, rate) = cstar_point();
    let a = (1.0 - x_star).sqrt();
    let b = x_star.sqrt();
    let mut amps = vec![C64::ZERO; 4];
    amps[0] = C64::new(a, 0.0);
    amps[3] = C64::new(0.0, b);
    (PureState::new(2, amps).expect("unit norm by construction"), rate)
}

/// Outcome of the random product-coupling rate sweep.
#[derive(Debug, Clone, Copy)]
pub struct RateSweepOutcome {
    pub cases: usize,
    /// max over cases and grid times of (measured rate - budget).
    pub max_excess_bits: f64,
    pub max_rate_bits: f64,
}

/// Draws random product-coupling instances (each side 1-2 core qubits
/// plus up to one ancilla), random product initial states, and checks
/// the finite-difference entropy rate against c* sum |r_k| at interior
/// grid times.
pub fn random_rate_sweep(cases: usize, seed: u64, plan: &PropagatorPlan) -> Result<RateSweepOutcome> {
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_rate = f64::NEG_INFINITY;
    for case in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((case as u64) << 20));
        let a_core = rng.random_range(1..=2usize);
        let anc_a = rng.random_range(0..=1usize);
        let b_core = rng.random_range(1..=2usize);
        let anc_b = rng.random_range(0..=1usize);
        let n = a_core + anc_a + b_core + anc_b;
        let a_side: Vec<usize> = (0..a_core + anc_a).collect();
        let a_core_qubits: Vec<usize> = (0..a_core).collect();
        let b_core_qubits: Vec<usize> = (a_core + anc_a..a_core + anc_a + b_core).collect();

        let n_couplings = rng.random_range(1..=2usize);
        let mut couplings = Vec::new();
        for _ in 0..n_couplings {
            let ja = random_hermitian_op(&a_core_qubits, 1.0, &mut rng, true);
            let jb = random_hermitian_op(&b_core_qubits, 1.0, &mut rng, true);
            let r = rng.random_range(-1.0..1.0f64);
            couplings.push(build_product_coupling(&ja, &jb, Schedule::constant(r))?);
        }
        let mut locals = Vec::new();
        for side in [&a_side[..], &(a_core + anc_a..n).collect::<Vec<_>>()[..]] {
            for _ in 0..rng.random_range(0..=2usize) {
                let k = rng.random_range(1..=2.min(side.len()));
                let mut qs = side.to_vec();
                qs.shuffle(&mut rng);
                qs.truncate(k);
                qs.sort_unstable();
                let op = random_hermitian_op(&qs, 2.0, &mut rng, false);
                locals.push(LocalTerm::new(op, Schedule::constant(1.0), TermKind::Local)?);
            }
        }
        let h = product_model(n, locals, couplings)?;

        // Random product initial state: S_A(0) = 0 across the cut.
        let mut amps = vec![C64::ONE];
        for _ in 0..n {
            let theta = rng.random_range(0.0..std::f64::consts::PI);
            let phi = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            let q = [
                C64::new((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), phi),
            ];
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * q[0]);
                next.push(a * q[1]);
            }
            amps = next;
        }
        let psi0 = PureState::normalized(n, amps)?;

        let traj = entropy_growth(&h, &psi0, &a_side, &[0.1, 0.25, 0.4], plan, Some(2e-3))?;
        for (i, rate) in traj.rate_bits.iter().enumerate() {
            if let Some(r) = rate {
                max_excess = max_excess.max(r - traj.budget_rate_bits[i]);
                max_rate = max_rate.max(*r);
            }
        }
    }
    Ok(RateSweepOutcome { cases, max_excess_bits: max_excess, max_rate_bits: max_rate })
}

/// Random Hermitian operator on the given qubits; `unit_norm` rescales
/// below operator norm 1 (coupling factors), otherwise the norm is
/// capped at `scale`.
fn random_hermitian_op(
    qubits: &[usize],
    scale: f64,
    rng: &mut ChaCha8Rng,
    unit_norm: bool,
) -> DenseOperator {
    let dim = 1usize << qubits.len();
    let a = Mat::from_fn(dim, dim, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let herm = (&a + a.adjoint().to_owned()) * faer::Scale(C64::new(0.5, 0.0));
    let op = DenseOperator::new(qubits.to_vec(), herm).expect("square matrix");
    let norm = op.norm();
    if norm < 1e-12 {
        return DenseOperator::identity(qubits.to_vec());
    }
    let factor = if unit_norm {
        rng.random_range(0.3..1.0) / norm
    } else {
        scale.min(norm) / norm
    };
    op.scale(C64::new(factor, 0.0))
}
