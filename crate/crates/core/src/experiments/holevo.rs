//! Signalling capacity of local encodings through the spin network.

use super::grid::ExperimentResult;
use crate::bounds::capacity_bound;
use crate::error::{Error, Result};
use crate::evolution::{evolve_state, PropagatorPlan};
use crate::hamiltonian::HamiltonianSpec;
use crate::quantum::{apply_local, partial_trace_state, DenseOperator, DensityMatrix, PureState};
use crate::C64;

/// One time slice of the capacity experiment.
#[derive(Debug, Clone, Copy)]
pub struct HolevoPoint {
    pub t: f64,
    /// Exact Holevo capacity of the induced channel, bits.
    pub c_chi_bits: f64,
    /// Largest trace-norm distance to the do-nothing output.
    pub eps_measured: f64,
    /// capacity_bound(eps_measured, |B|, 2), bits.
    pub bound_bits: f64,
}

pub fn holevo_as_result(points: &[HolevoPoint]) -> ExperimentResult {
    let mut res = ExperimentResult::new("holevo", &["t", "series"]);
    // series 0: C_chi, series 1: bound, series 2: eps.
    for p in points {
        res.push(vec![p.t, 0.0], p.c_chi_bits, None);
        res.push(vec![p.t, 1.0], p.bound_bits, None);
        res.push(vec![p.t, 2.0], p.eps_measured, None);
    }
    res
}

/// The uniform two-qubit Pauli ensemble on the given pair of qubits:
/// all 16 tensor products of {1, X, Y, Z}, probability 1/16 each.
pub fn pauli_ensemble_2q(q0: usize, q1: usize) -> Vec<(f64, DenseOperator)> {
    let paulis = |q: usize| {
        vec![
            DenseOperator::identity(vec![q]),
            DenseOperator::pauli_x(q),
            DenseOperator::pauli_y(q),
            DenseOperator::pauli_z(q),
        ]
    };
    let mut out = Vec::with_capacity(16);
    for a in paulis(q0) {
        for b in &paulis(q1) {
            out.push((1.0 / 16.0, a.product(b).expect("distinct qubits")));
        }
    }
    out
}

/// Exact Holevo capacity of the channel "apply U_A^k, evolve for t,
/// look at B", compared against the light-cone capacity bound evaluated
/// at the measured trace-norm disturbance.
///
/// The ensemble weights must sum to 1 and every unitary must act inside
/// region A; B must be disjoint from A.
pub fn holevo_experiment(
    h: &HamiltonianSpec,
    ensemble: &[(f64, DenseOperator)],
    psi0: &PureState,
    region_a: &[usize],
    region_b: &[usize],
    t_values: &[f64],
    plan: &PropagatorPlan,
) -> Result<Vec<HolevoPoint>> {
    if ensemble.is_empty() {
        return Err(Error::domain("ensemble must be nonempty"));
    }
    let p_sum: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (p_sum - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("ensemble weights sum to {p_sum}, not 1")));
    }
    if region_b.is_empty() || region_b.iter().any(|q| region_a.contains(q)) {
        return Err(Error::domain("region B must be nonempty and disjoint from A"));
    }
    for (p, u) in ensemble {
        if *p < 0.0 {
            return Err(Error::domain("ensemble weights must be nonnegative"));
        }
        if !u.support().iter().all(|q| region_a.contains(q)) {
            return Err(Error::domain("encoding unitaries must be supported on region A"));
        }
        let gram = u.adjoint().matmul(u)?;
        let dim = gram.dim();
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { C64::ONE } else { C64::ZERO };
                if (gram.matrix()[(i, j)] - expect).norm() > 1e-10 {
                    return Err(Error::domain("ensemble operators must be unitary"));
                }
            }
        }
    }
    if t_values.is_empty() || !t_values.windows(2).all(|w| w[0] < w[1]) || t_values[0] < 0.0 {
        return Err(Error::domain("time grid must be nonnegative and strictly increasing"));
    }

    // March every branch (one per unitary, plus the do-nothing reference)
    // along the shared time grid.
    let mut branches: Vec<(f64, PureState)> = ensemble
        .iter()
        .map(|(p, u)| -> Result<(f64, PureState)> {
            let amps = apply_local(psi0, u)?;
            Ok((*p, PureState::normalized(psi0.n_qubits(), amps)?))
        })
        .collect::<Result<_>>()?;
    let mut reference = psi0.clone();

    let n_b = region_b.len();
    let mut points = Vec::with_capacity(t_values.len());
    let mut t_prev = 0.0;
    for &t in t_values {
        if t > t_prev {
            let mut leg = *plan;
            leg.t_start = t_prev;
            leg.t_end = t;
            for (_, state) in branches.iter_mut() {
                *state = evolve_state(h, state, &leg)?;
            }
            reference = evolve_state(h, &reference, &leg)?;
            t_prev = t;
        }
        let sigma_ref = partial_trace_state(&reference, region_b)?;
        let mut outputs: Vec<(f64, DensityMatrix)> = Vec::with_capacity(branches.len());
        for (p, state) in &branches {
            outputs.push((*p, partial_trace_state(state, region_b)?));
        }
        let average = DensityMatrix::mixture(&outputs)?;
        let mut c_chi = average.von_neumann_entropy()?;
        let mut eps: f64 = 0.0;
        for (p, sigma) in &outputs {
            c_chi -= p * sigma.von_neumann_entropy()?;
            eps = eps.max(sigma.trace_distance(&sigma_ref)?);
        }
        // Round-off can leave a tiny negative capacity at t = 0.
        if c_chi < 0.0 && c_chi > -1e-9 {
            c_chi = 0.0;
        }
        let bound = capacity_bound(eps.min(2.0), n_b, 2)?;
        points.push(HolevoPoint { t, c_chi_bits: c_chi, eps_measured: eps, bound_bits: bound });
    }
    Ok(points)
}
