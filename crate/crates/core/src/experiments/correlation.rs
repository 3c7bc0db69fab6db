//! Connected correlation functions along a quench trajectory.

use super::grid::ExperimentResult;
use crate::error::{Error, Result};
use crate::evolution::{evolve_state, PropagatorPlan};
use crate::hamiltonian::HamiltonianSpec;
use crate::quantum::{apply_local, DenseOperator, PureState};
use crate::C64;

/// <O_A O_B>_c = <O_A O_B> - <O_A><O_B> over a time grid.
#[derive(Debug, Clone)]
pub struct CorrelationTrajectory {
    pub t_values: Vec<f64>,
    pub connected: Vec<f64>,
}

impl CorrelationTrajectory {
    pub fn as_result(&self) -> ExperimentResult {
        let mut res = ExperimentResult::new("correlation", &["t"]);
        for (i, &t) in self.t_values.iter().enumerate() {
            res.push(vec![t], self.connected[i], None);
        }
        res
    }
}

/// Schrödinger-picture evaluation: the state is evolved once along the
/// grid and both expectation values are exact on it.
pub fn correlation_spread(
    h: &HamiltonianSpec,
    psi0: &PureState,
    op_a: &DenseOperator,
    op_b: &DenseOperator,
    t_values: &[f64],
    plan: &PropagatorPlan,
) -> Result<CorrelationTrajectory> {
    if t_values.is_empty() || !t_values.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::domain("time grid must be nonempty and strictly increasing"));
    }
    if t_values[0] < 0.0 {
        return Err(Error::domain("time grid must be nonnegative"));
    }
    if !op_a.is_hermitian(1e-12) || !op_b.is_hermitian(1e-12) {
        return Err(Error::domain("correlation observables must be Hermitian"));
    }
    let mut connected = Vec::with_capacity(t_values.len());
    let mut state = psi0.clone();
    let mut t_prev = 0.0;
    for &t in t_values {
        if t > t_prev {
            let mut leg = *plan;
            leg.t_start = t_prev;
            leg.t_end = t;
            state = evolve_state(h, &state, &leg)?;
            t_prev = t;
        }
        connected.push(connected_value(&state, op_a, op_b)?);
    }
    Ok(CorrelationTrajectory { t_values: t_values.to_vec(), connected })
}

fn connected_value(state: &PureState, op_a: &DenseOperator, op_b: &DenseOperator) -> Result<f64> {
    let a_psi = apply_local(state, op_a)?;
    let b_psi = apply_local(state, op_b)?;
    let amps = state.amplitudes();
    let mean = |v: &[C64]| -> C64 { amps.iter().zip(v).map(|(x, y)| x.conj() * y).sum() };
    let ea = mean(&a_psi);
    let eb = mean(&b_psi);
    // <A B> = <A psi | B psi> for Hermitian A.
    let eab: C64 = a_psi.iter().zip(&b_psi).map(|(x, y)| x.conj() * y).sum();
    Ok((eab - ea * eb).re)
}
