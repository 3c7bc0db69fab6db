//! Trotter product formulas over the Hamiltonian's term list.

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::quantum::{apply_on_support, PureState};
use crate::C64;
use faer::{Mat, Side};

/// Product-formula evolution: order 1 applies one exponential per term
/// per step, order 2 sweeps the terms forward and backward with half
/// steps. Schedules are sampled at each step midpoint.
pub fn trotter_evolve(
    h: &HamiltonianSpec,
    psi: &PureState,
    t0: f64,
    t1: f64,
    steps: usize,
    order: u8,
) -> Result<PureState> {
    if !(order == 1 || order == 2) {
        return Err(Error::domain(format!("trotter order must be 1 or 2, got {order}")));
    }
    if steps == 0 {
        return Err(Error::domain("trotter needs at least one step"));
    }
    if psi.n_qubits() != h.n_qubits() {
        return Err(Error::Dimension {
            context: "trotter_evolve",
            expected: h.n_qubits(),
            found: psi.n_qubits(),
        });
    }
    let n = h.n_qubits();
    // Eigendecompose each term's base once; the per-step exponentials
    // reuse the factors with different phases.
    let factors: Vec<TermFactor> = h
        .terms()
        .iter()
        .map(|t| TermFactor::new(t.base().matrix(), t.base().support().to_vec()))
        .collect::<Result<_>>()?;

    let tau = (t1 - t0) / steps as f64;
    let mut state = psi.amplitudes().to_vec();
    let mut scratch = vec![C64::ZERO; state.len()];
    for k in 0..steps {
        let t_mid = t0 + (k as f64 + 0.5) * tau;
        let rs = h.schedule_values(t_mid);
        match order {
            1 => {
                for (f, &r) in factors.iter().zip(&rs) {
                    f.apply_exp(n, r * tau, &mut state, &mut scratch);
                }
            }
            2 => {
                for (f, &r) in factors.iter().zip(&rs) {
                    f.apply_exp(n, 0.5 * r * tau, &mut state, &mut scratch);
                }
                for (f, &r) in factors.iter().zip(&rs).rev() {
                    f.apply_exp(n, 0.5 * r * tau, &mut state, &mut scratch);
                }
            }
            _ => unreachable!(),
        }
    }
    PureState::normalized(n, state)
}

struct TermFactor {
    support: Vec<usize>,
    vectors: Mat<C64>,
    values: Vec<f64>,
}

impl TermFactor {
    fn new(base: &Mat<C64>, support: Vec<usize>) -> Result<Self> {
        let eig = base
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Backend(format!("term eigendecomposition: {e:?}")))?;
        Ok(TermFactor {
            support,
            vectors: eig.U().to_owned(),
            values: eig.S().column_vector().iter().map(|c| c.re).collect(),
        })
    }

    /// state <- exp(-i * angle * base) state on the support qubits.
    fn apply_exp(&self, n: usize, angle: f64, state: &mut Vec<C64>, scratch: &mut Vec<C64>) {
        if angle == 0.0 {
            return;
        }
        let d = self.vectors.nrows();
        let mut small = Mat::<C64>::zeros(d, d);
        for k in 0..d {
            let phase = C64::new(0.0, -self.values[k] * angle).exp();
            for i in 0..d {
                for j in 0..d {
                    small[(i, j)] += self.vectors[(i, k)] * phase * self.vectors[(j, k)].conj();
                }
            }
        }
        apply_on_support(&small, &self.support, n, state, scratch, C64::ONE, false);
        std::mem::swap(state, scratch);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve_state, vec_distance, PropagatorPlan};
    use crate::hamiltonian::build_tfim;
    use crate::lattice::build_chain;

    #[test]
    fn commuting_terms_are_exact_at_one_step() {
        // Z-only TFIM: all terms commute.
        let g = build_chain(4, false).unwrap();
        let h = build_tfim(&g, 1.0, 0.0).unwrap();
        let psi = PureState::plus_state(4);
        let exact = evolve_state(&h, &psi, &PropagatorPlan::to_time(1.3).unwrap()).unwrap();
        let trotter = trotter_evolve(&h, &psi, 0.0, 1.3, 1, 1).unwrap();
        assert!(vec_distance(exact.amplitudes(), trotter.amplitudes()) < 1e-10);
    }

    #[test]
    fn converges_to_exact_evolution() {
        let g = build_chain(5, false).unwrap();
        let h = build_tfim(&g, 1.0, 1.0).unwrap();
        let psi = PureState::plus_state(5);
        let exact = evolve_state(&h, &psi, &PropagatorPlan::to_time(1.0).unwrap()).unwrap();
        let mut prev_err = f64::INFINITY;
        for steps in [4, 16, 64, 256] {
            let approx = trotter_evolve(&h, &psi, 0.0, 1.0, steps, 1).unwrap();
            let err = vec_distance(exact.amplitudes(), approx.amplitudes());
            assert!(err < prev_err, "error must shrink with more steps");
            prev_err = err;
        }
        assert!(prev_err < 1e-2);
    }

    #[test]
    fn error_scaling_slopes() {
        // Log-log regression of trotter error vs steps: slope 1 for
        // order 1 and slope 2 for order 2 (within 0.2).
        let g = build_chain(6, false).unwrap();
        let h = build_tfim(&g, 1.0, 1.0).unwrap();
        let psi = PureState::plus_state(6);
        let exact = evolve_state(&h, &psi, &PropagatorPlan::to_time(1.0).unwrap()).unwrap();
        for (order, expect) in [(1u8, 1.0f64), (2, 2.0)] {
            let steps: Vec<usize> = vec![8, 16, 32, 64, 128];
            let pts: Vec<(f64, f64)> = steps
                .iter()
                .map(|&s| {
                    let approx = trotter_evolve(&h, &psi, 0.0, 1.0, s, order).unwrap();
                    let err = vec_distance(exact.amplitudes(), approx.amplitudes());
                    ((s as f64).ln(), err.ln())
                })
                .collect();
            let slope = -least_squares_slope(&pts);
            assert!(
                (slope - expect).abs() < 0.2,
                "order {order}: slope {slope}, expected {expect}"
            );
        }
    }

    fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = build_chain(3, false).unwrap();
        let h = build_tfim(&g, 1.0, 1.0).unwrap();
        let psi = PureState::plus_state(3);
        assert!(trotter_evolve(&h, &psi, 0.0, 1.0, 10, 3).is_err());
        assert!(trotter_evolve(&h, &psi, 0.0, 1.0, 0, 1).is_err());
    }
}
