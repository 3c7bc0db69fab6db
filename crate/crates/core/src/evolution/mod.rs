//! Time evolution: Schrödinger propagation of states, Heisenberg
//! propagation of operators, and Trotter product formulas.
//!
//! The integrator is the piecewise-constant midpoint rule. Schedules are
//! piecewise constant by construction, so steps are aligned with the
//! schedule breakpoints and, inside a constant segment, the per-step
//! factors commute; the segment exponential is applied in one shot.

mod krylov;
mod propagator;
mod trotter;

pub use krylov::{krylov_expv, KrylovOptions};
pub use propagator::Propagator;
pub use trotter::trotter_evolve;

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianSpec, DENSE_QUBIT_LIMIT};
use crate::quantum::{kron_embed, DenseOperator, PureState};
use crate::C64;
use faer::Mat;

/// Largest system the matrix-free Krylov path accepts.
pub const KRYLOV_QUBIT_LIMIT: usize = 20;
/// Auto path selection switches from dense to Krylov above this size.
const DENSE_AUTO_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Exact exponential per constant-schedule segment.
    ExactStep,
    Trotter1,
    Trotter2,
}

/// Which propagation backend to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathSelect {
    /// Dense up to 10 qubits, Krylov from 11 to 20.
    #[default]
    Auto,
    /// Dense eigendecomposition path, capped at 12 qubits.
    Dense,
    /// Lanczos exponential-times-vector, capped at 20 qubits.
    Krylov,
}

/// Integration window and controls. Times are in units of inverse
/// energy (hbar = 1).
#[derive(Debug, Clone, Copy)]
pub struct PropagatorPlan {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub method: Method,
    /// Convergence tolerance for the dt-halving check.
    pub tolerance: f64,
    pub path: PathSelect,
}

impl PropagatorPlan {
    pub fn new(t_start: f64, t_end: f64, dt: f64, tolerance: f64) -> Result<Self> {
        let plan = PropagatorPlan {
            t_start,
            t_end,
            dt,
            method: Method::ExactStep,
            tolerance,
            path: PathSelect::Auto,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Default controls over [0, t]: dt = 0.01, tolerance 1e-8.
    pub fn to_time(t: f64) -> Result<Self> {
        Self::new(0.0, t, 0.01, 1e-8)
    }

    pub fn with_path(mut self, path: PathSelect) -> Self {
        self.path = path;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::domain(format!("plan dt must be positive, got {}", self.dt)));
        }
        if self.t_end < self.t_start {
            return Err(Error::domain("plan t_end must be >= t_start"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("plan tolerance must be positive"));
        }
        Ok(())
    }

    pub(crate) fn resolve_path(&self, n: usize, what: &'static str) -> Result<PathSelect> {
        match self.path {
            PathSelect::Auto => {
                if n <= DENSE_AUTO_LIMIT {
                    Ok(PathSelect::Dense)
                } else if n <= KRYLOV_QUBIT_LIMIT {
                    Ok(PathSelect::Krylov)
                } else {
                    Err(Error::Capability { what, requested: n, limit: KRYLOV_QUBIT_LIMIT })
                }
            }
            PathSelect::Dense => {
                if n <= DENSE_QUBIT_LIMIT {
                    Ok(PathSelect::Dense)
                } else {
                    Err(Error::Capability { what, requested: n, limit: DENSE_QUBIT_LIMIT })
                }
            }
            PathSelect::Krylov => {
                if n <= KRYLOV_QUBIT_LIMIT {
                    Ok(PathSelect::Krylov)
                } else {
                    Err(Error::Capability { what, requested: n, limit: KRYLOV_QUBIT_LIMIT })
                }
            }
        }
    }
}

/// Propagate a state through the plan window with step-halving
/// convergence control: the result is accepted once halving dt moves the
/// final state by less than the plan tolerance (Euclidean norm).
pub fn evolve_state(h: &HamiltonianSpec, psi: &PureState, plan: &PropagatorPlan) -> Result<PureState> {
    plan.validate()?;
    if psi.n_qubits() != h.n_qubits() {
        return Err(Error::Dimension {
            context: "evolve_state",
            expected: h.n_qubits(),
            found: psi.n_qubits(),
        });
    }
    if plan.method != Method::ExactStep {
        let steps = ((plan.t_end - plan.t_start) / plan.dt).ceil().max(1.0) as usize;
        let order = if plan.method == Method::Trotter1 { 1 } else { 2 };
        return trotter_evolve(h, psi, plan.t_start, plan.t_end, steps, order);
    }
    let path = plan.resolve_path(h.n_qubits(), "evolve_state")?;
    let mut prop = Propagator::new(h, path)?;
    let mut dt = plan.dt;
    let mut prev = prop.evolve_vec(psi.amplitudes(), plan.t_start, plan.t_end, dt)?;
    const MAX_HALVINGS: usize = 12;
    for _ in 0..MAX_HALVINGS {
        dt *= 0.5;
        let fine = prop.evolve_vec(psi.amplitudes(), plan.t_start, plan.t_end, dt)?;
        let delta = vec_distance(&prev, &fine);
        if delta < plan.tolerance {
            return PureState::normalized(psi.n_qubits(), fine);
        }
        prev = fine;
    }
    let fine = prop.evolve_vec(psi.amplitudes(), plan.t_start, plan.t_end, dt * 0.5)?;
    let delta = vec_distance(&prev, &fine);
    if delta < plan.tolerance {
        return PureState::normalized(psi.n_qubits(), fine);
    }
    Err(Error::EvolveNonConverged {
        delta,
        tolerance: plan.tolerance,
        dt,
        last_two: Box::new((prev, fine)),
    })
}

pub(crate) fn vec_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Heisenberg-picture operator O(t) = U†(t) (O ⊗ 1) U(t), dense path.
pub fn heisenberg_operator(
    h: &HamiltonianSpec,
    op: &DenseOperator,
    t: f64,
    plan: &PropagatorPlan,
) -> Result<DenseOperator> {
    let n = h.n_qubits();
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::Capability {
            what: "heisenberg_operator (dense)",
            requested: n,
            limit: DENSE_QUBIT_LIMIT,
        });
    }
    let mut prop = Propagator::new(h, PathSelect::Dense)?;
    let u = prop.unitary(plan.t_start, t, plan.dt)?;
    let embedded = kron_embed(op, n)?;
    // U† O U, exploiting locality of O on the left factor.
    let ou = embedded.matrix() * &u;
    let out = u.adjoint() * ou;
    DenseOperator::new((0..n).collect(), out)
}

/// Matrix-free O(t) v = U†(t) (O ⊗ 1) U(t) v: forward evolution, local
/// application, backward evolution.
pub fn heisenberg_apply(
    h: &HamiltonianSpec,
    op: &DenseOperator,
    t: f64,
    v: &[C64],
    plan: &PropagatorPlan,
) -> Result<Vec<C64>> {
    let n = h.n_qubits();
    if v.len() != (1usize << n) {
        return Err(Error::Dimension {
            context: "heisenberg_apply",
            expected: 1usize << n,
            found: v.len(),
        });
    }
    let path = plan.resolve_path(n, "heisenberg_apply")?;
    let mut prop = Propagator::new(h, path)?;
    let forward = prop.evolve_vec(v, plan.t_start, t, plan.dt)?;
    let mut applied = vec![C64::ZERO; forward.len()];
    crate::quantum::apply_term_raw(op, n, &forward, &mut applied, C64::ONE, false);
    prop.evolve_vec_adjoint(&applied, plan.t_start, t, plan.dt)
}

/// Dense unitary of the whole window (test and small-system use).
pub fn propagator_unitary(h: &HamiltonianSpec, t: f64, plan: &PropagatorPlan) -> Result<Mat<C64>> {
    let mut prop = Propagator::new(h, PathSelect::Dense)?;
    prop.unitary(plan.t_start, t, plan.dt)
}
