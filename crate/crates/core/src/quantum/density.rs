//! Density matrices, reductions, and the von Neumann entropy.

use super::{partial_trace_matrix, DenseOperator, PureState, SupportIndexer};
use crate::error::{Error, Result};
use crate::C64;
use faer::{Mat, Side};

/// Hermitian, unit-trace operator on a qubit subset.
///
/// Hermiticity and trace are checked at construction (1e-12); positive
/// semidefiniteness is enforced where eigenvalues are actually computed,
/// clamping round-off down to -1e-10.
#[derive(Clone)]
pub struct DensityMatrix {
    support: Vec<usize>,
    matrix: Mat<C64>,
}

impl std::fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DensityMatrix")
            .field("support", &self.support)
            .field("dim", &self.matrix.nrows())
            .finish()
    }
}

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
/// Evolution round-off produces tiny negative eigenvalues; anything above
/// this (in magnitude) is a real domain error.
pub const PSD_TOL: f64 = -1e-10;

impl DensityMatrix {
    pub fn new(support: Vec<usize>, matrix: Mat<C64>) -> Result<Self> {
        let dim = 1usize << support.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension {
                context: "DensityMatrix::new",
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let mut trace = C64::ZERO;
        for i in 0..dim {
            trace += matrix[(i, i)];
            for j in 0..dim {
                if (matrix[(i, j)] - matrix[(j, i)].conj()).norm() > HERMITICITY_TOL {
                    return Err(Error::domain("density matrix is not Hermitian within 1e-12"));
                }
            }
        }
        if (trace - C64::ONE).norm() > TRACE_TOL {
            return Err(Error::domain(format!(
                "density matrix trace {trace} deviates from 1 beyond 1e-12"
            )));
        }
        Ok(DensityMatrix { support, matrix })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    /// rho = |psi><psi| on the state's full register.
    pub fn from_pure(psi: &PureState) -> Self {
        let amps = psi.amplitudes();
        let dim = amps.len();
        let matrix = Mat::from_fn(dim, dim, |i, j| amps[i] * amps[j].conj());
        DensityMatrix { support: (0..psi.n_qubits()).collect(), matrix }
    }

    /// Reduce onto the `keep` qubits (they must be part of the support).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = validate_keep(keep, &self.support)?;
        let positions: Vec<usize> = keep
            .iter()
            .map(|q| self.support.iter().position(|s| s == q).unwrap())
            .collect();
        let matrix = partial_trace_matrix(&self.matrix, self.support.len(), &positions);
        Ok(DensityMatrix { support: keep, matrix })
    }

    /// Eigenvalues, ascending. Values below `PSD_TOL` are a domain error.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let evs = self
            .matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Backend(format!("eigendecomposition failed: {e:?}")))?;
        if let Some(&bad) = evs.iter().find(|&&l| l < PSD_TOL) {
            return Err(Error::domain(format!(
                "density matrix has eigenvalue {bad:.3e} below the -1e-10 PSD tolerance"
            )));
        }
        Ok(evs)
    }

    /// Von Neumann entropy in bits: -sum lambda log2 lambda over
    /// eigenvalues above 1e-14. Tiny negative eigenvalues (round-off)
    /// are clamped to zero with a logged warning.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        let evs = self.eigenvalues()?;
        let mut clamped = 0usize;
        let mut entropy = 0.0;
        for &l in &evs {
            if l < 0.0 {
                clamped += 1;
                continue;
            }
            if l > 1e-14 {
                entropy -= l * l.log2();
            }
        }
        if clamped > 0 {
            log::warn!("clamped {clamped} negative eigenvalue(s) above -1e-10 to zero for entropy");
        }
        Ok(entropy)
    }

    /// Trace-norm distance ||rho - sigma||_1.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                context: "trace_distance",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let diff = &self.matrix - &other.matrix;
        Ok(super::trace_norm(&diff))
    }

    /// Convex mixture sum_k p_k rho_k.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
        let first = parts.first().ok_or_else(|| Error::domain("empty mixture"))?;
        let dim = first.1.dim();
        let p_sum: f64 = parts.iter().map(|(p, _)| p).sum();
        if (p_sum - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("mixture weights sum to {p_sum}, not 1")));
        }
        let mut matrix = Mat::<C64>::zeros(dim, dim);
        for (p, rho) in parts {
            if *p < 0.0 {
                return Err(Error::domain("mixture weights must be nonnegative"));
            }
            if rho.dim() != dim {
                return Err(Error::Dimension {
                    context: "mixture",
                    expected: dim,
                    found: rho.dim(),
                });
            }
            matrix += &rho.matrix * faer::Scale(C64::new(*p, 0.0));
        }
        DensityMatrix::new(first.1.support.clone(), matrix)
    }
}

fn validate_keep(keep: &[usize], support: &[usize]) -> Result<Vec<usize>> {
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::domain("partial trace requires a nonempty keep set"));
    }
    if let Some(&q) = keep.iter().find(|q| !support.contains(q)) {
        return Err(Error::domain(format!("keep qubit {q} not in the system")));
    }
    Ok(keep)
}

/// Reduced density matrix of a pure state on the `keep` qubits.
pub fn partial_trace_state(psi: &PureState, keep: &[usize]) -> Result<DensityMatrix> {
    let support: Vec<usize> = (0..psi.n_qubits()).collect();
    let keep = validate_keep(keep, &support)?;
    let indexer = SupportIndexer::new(&keep, psi.n_qubits());
    let d = indexer.sub_dim();
    let subs = indexer.sub_table();
    let mut matrix = Mat::<C64>::zeros(d, d);
    let amps = psi.amplitudes();
    let mut buf = vec![C64::ZERO; d];
    for e in 0..indexer.env_dim() {
        let base = indexer.spread_env(e);
        for (s, &off) in subs.iter().enumerate() {
            buf[s] = amps[base | off];
        }
        for i in 0..d {
            for j in 0..d {
                matrix[(i, j)] += buf[i] * buf[j].conj();
            }
        }
    }
    Ok(DensityMatrix { support: keep, matrix })
}

/// Transition matrix `X = Tr_env(|psi2><psi1|)` on the `keep` qubits:
/// `Tr(O X) = <psi1| O |psi2>` for every operator O supported on `keep`,
/// so `||X||_1` is the largest local cross matrix element.
pub fn transition_matrix(psi1: &PureState, psi2: &PureState, keep: &[usize]) -> Result<DenseOperator> {
    if psi1.n_qubits() != psi2.n_qubits() {
        return Err(Error::Dimension {
            context: "transition_matrix",
            expected: psi1.n_qubits(),
            found: psi2.n_qubits(),
        });
    }
    let support: Vec<usize> = (0..psi1.n_qubits()).collect();
    let keep = validate_keep(keep, &support)?;
    let indexer = SupportIndexer::new(&keep, psi1.n_qubits());
    let d = indexer.sub_dim();
    let subs = indexer.sub_table();
    let mut matrix = Mat::<C64>::zeros(d, d);
    let a1 = psi1.amplitudes();
    let a2 = psi2.amplitudes();
    let mut b1 = vec![C64::ZERO; d];
    let mut b2 = vec![C64::ZERO; d];
    for e in 0..indexer.env_dim() {
        let base = indexer.spread_env(e);
        for (s, &off) in subs.iter().enumerate() {
            b1[s] = a1[base | off];
            b2[s] = a2[base | off];
        }
        for i in 0..d {
            for j in 0..d {
                matrix[(i, j)] += b2[i] * b1[j].conj();
            }
        }
    }
    DenseOperator::new(keep, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{kron_embed, trace_norm};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bell_pair_reduces_to_maximally_mixed() {
        let bell = PureState::ghz(2);
        let rho = partial_trace_state(&bell, &[0]).unwrap();
        assert_relative_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(rho.matrix()[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert!(rho.matrix()[(0, 1)].norm() < 1e-14);
        assert_relative_eq!(rho.von_neumann_entropy().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn product_state_reduces_to_projector() {
        let psi = PureState::basis_state(2, &[0, 1]).unwrap();
        let rho = partial_trace_state(&psi, &[1]).unwrap();
        assert_relative_eq!(rho.matrix()[(1, 1)].re, 1.0, epsilon = 1e-14);
        assert!(rho.matrix()[(0, 0)].norm() < 1e-14);
        assert_relative_eq!(rho.von_neumann_entropy().unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ghz_two_qubit_marginal() {
        let rho = partial_trace_state(&PureState::ghz(3), &[0, 1]).unwrap();
        // (|00><00| + |11><11|)/2.
        assert_relative_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(rho.matrix()[(3, 3)].re, 0.5, epsilon = 1e-14);
        assert!(rho.matrix()[(0, 3)].norm() < 1e-14);
        assert_relative_eq!(rho.von_neumann_entropy().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn maximally_mixed_two_qubit_entropy_is_two_bits() {
        let dim = 4;
        let m = Mat::from_fn(dim, dim, |i, j| {
            if i == j { C64::new(0.25, 0.0) } else { C64::ZERO }
        });
        let rho = DensityMatrix::new(vec![0, 1], m).unwrap();
        assert_relative_eq!(rho.von_neumann_entropy().unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_keep_is_rejected() {
        let psi = PureState::ghz(2);
        assert!(partial_trace_state(&psi, &[]).is_err());
    }

    #[test]
    fn transition_matrix_of_equal_states_is_the_reduction() {
        let psi = PureState::ghz(3);
        let x = transition_matrix(&psi, &psi, &[0, 2]).unwrap();
        let rho = partial_trace_state(&psi, &[0, 2]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((x.matrix()[(i, j)] - rho.matrix()[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn transition_matrix_of_locally_distinct_product_pair() {
        // |00> vs |10>: states differing only on the kept qubit give |1><0|.
        let psi1 = PureState::basis_state(2, &[0, 0]).unwrap();
        let psi2 = PureState::basis_state(2, &[1, 0]).unwrap();
        let x = transition_matrix(&psi1, &psi2, &[0]).unwrap();
        assert!((x.matrix()[(1, 0)] - C64::ONE).norm() < 1e-14);
        assert!(x.matrix()[(0, 0)].norm() < 1e-14);
        assert!(x.matrix()[(0, 1)].norm() < 1e-14);
        assert!(x.matrix()[(1, 1)].norm() < 1e-14);
        // Orthogonal on the traced-out qubit instead: no local operator
        // connects |00> and |11>, so the transition matrix vanishes.
        let psi3 = PureState::basis_state(2, &[1, 1]).unwrap();
        let x = transition_matrix(&psi1, &psi3, &[0]).unwrap();
        assert!(trace_norm(x.matrix()) < 1e-14);
    }

    #[test]
    fn transition_matrix_ghz_pair_closed_form() {
        // Oracle: direct outer-product partial trace at n = 4.
        let psi1 = PureState::ghz(4);
        let psi2 = PureState::ghz_minus(4);
        let x = transition_matrix(&psi1, &psi2, &[0]).unwrap();
        // Expected: (|0><0| - |1><1|)/2.
        assert!((x.matrix()[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((x.matrix()[(1, 1)] - C64::new(-0.5, 0.0)).norm() < 1e-14);
        assert!(x.matrix()[(0, 1)].norm() < 1e-14);
        assert!((trace_norm(x.matrix()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transition_matrix_trace_identity_against_random_observables() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.random_range(2..=6);
            let dim = 1usize << n;
            let rv = |rng: &mut ChaCha8Rng| {
                let v: Vec<C64> = (0..dim)
                    .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect();
                PureState::normalized(n, v).unwrap()
            };
            let psi1 = rv(&mut rng);
            let psi2 = rv(&mut rng);
            let k = rng.random_range(1..=2);
            let mut keep: Vec<usize> = (0..n).collect();
            keep.shuffle(&mut rng);
            keep.truncate(k);
            keep.sort_unstable();

            let x = transition_matrix(&psi1, &psi2, &keep).unwrap();
            let d = 1usize << k;
            let m = Mat::from_fn(d, d, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let obs = DenseOperator::new(keep.clone(), m).unwrap();

            // Tr(O X).
            let mut tr = C64::ZERO;
            for i in 0..d {
                for j in 0..d {
                    tr += obs.matrix()[(i, j)] * x.matrix()[(j, i)];
                }
            }
            // <psi1| O |psi2> via dense embedding.
            let full = kron_embed(&obs, n).unwrap();
            let mut applied = vec![C64::ZERO; dim];
            for i in 0..dim {
                for j in 0..dim {
                    applied[i] += full.matrix()[(i, j)] * psi2.amplitudes()[j];
                }
            }
            let expect: C64 = psi1
                .amplitudes()
                .iter()
                .zip(&applied)
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!((tr - expect).norm() < 1e-10, "trace identity violated: {tr} vs {expect}");
        }
    }

    #[test]
    fn reduction_of_pure_state_is_valid_density_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = rng.random_range(2..=6);
            let dim = 1usize << n;
            let v: Vec<C64> = (0..dim)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let psi = PureState::normalized(n, v).unwrap();
            let keep: Vec<usize> = (0..n).filter(|q| q % 2 == 0).collect();
            let rho = partial_trace_state(&psi, &keep).unwrap();
            // Validity: reconstructing through the checked constructor works
            // and all eigenvalues are nonnegative within tolerance.
            let rho2 = DensityMatrix::new(rho.support().to_vec(), rho.matrix().clone());
            assert!(rho2.is_ok());
            let evs = rho.eigenvalues().unwrap();
            assert!(evs.iter().all(|&l| l >= super::PSD_TOL));
        }
    }

    #[test]
    fn density_partial_trace_composes_with_state_reduction() {
        let psi = PureState::ghz(4);
        let rho_full = DensityMatrix::from_pure(&psi);
        let a = rho_full.partial_trace(&[0, 3]).unwrap();
        let b = partial_trace_state(&psi, &[0, 3]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((a.matrix()[(i, j)] - b.matrix()[(i, j)]).norm() < 1e-13);
            }
        }
    }
}
