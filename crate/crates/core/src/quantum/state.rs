//! Pure states and matrix-free local operator application.

use super::{apply_on_support, DenseOperator};
use crate::error::{Error, Result};
use crate::C64;

/// Normalized state vector of an `n`-qubit register.
#[derive(Clone)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl std::fmt::Debug for PureState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PureState").field("n_qubits", &self.n_qubits).finish()
    }
}

const NORM_TOL: f64 = 1e-12;

impl PureState {
    /// Wrap an amplitude vector; must already be normalized to 1e-12.
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n_qubits {
            return Err(Error::Dimension {
                context: "PureState::new",
                expected: 1usize << n_qubits,
                found: amplitudes.len(),
            });
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("state norm {norm} deviates from 1 beyond 1e-12")));
        }
        Ok(PureState { n_qubits, amplitudes })
    }

    /// Normalize and wrap an arbitrary nonzero amplitude vector.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm < 1e-300 {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        let inv = 1.0 / norm;
        for a in &mut amplitudes {
            *a *= inv;
        }
        PureState::new(n_qubits, amplitudes)
    }

    /// Computational basis state |b_0 b_1 ... b_{n-1}>.
    pub fn basis_state(n_qubits: usize, bits: &[u8]) -> Result<Self> {
        if bits.len() != n_qubits {
            return Err(Error::Dimension {
                context: "PureState::basis_state",
                expected: n_qubits,
                found: bits.len(),
            });
        }
        let mut index = 0usize;
        for (q, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::domain("basis bits must be 0 or 1"));
            }
            index |= (b as usize) << (n_qubits - 1 - q);
        }
        let mut amplitudes = vec![C64::ZERO; 1 << n_qubits];
        amplitudes[index] = C64::ONE;
        Ok(PureState { n_qubits, amplitudes })
    }

    /// |00...0>.
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amplitudes = vec![C64::ZERO; 1 << n_qubits];
        amplitudes[0] = C64::ONE;
        PureState { n_qubits, amplitudes }
    }

    /// (|0...0> + |1...1>)/sqrt(2).
    pub fn ghz(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut amplitudes = vec![C64::ZERO; dim];
        let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amplitudes[0] = a;
        amplitudes[dim - 1] = a;
        PureState { n_qubits, amplitudes }
    }

    /// (|0...0> - |1...1>)/sqrt(2), the GHZ brother state.
    pub fn ghz_minus(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut amplitudes = vec![C64::ZERO; dim];
        let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amplitudes[0] = a;
        amplitudes[dim - 1] = -a;
        PureState { n_qubits, amplitudes }
    }

    /// |+>^n, all spins along +x.
    pub fn plus_state(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        PureState { n_qubits, amplitudes: vec![a; dim] }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// <psi| O |psi> for an operator on a qubit subset.
    pub fn expectation(&self, op: &DenseOperator) -> Result<C64> {
        let applied = apply_local(self, op)?;
        Ok(inner(&self.amplitudes, &applied))
    }
}

pub(crate) fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Apply a local operator to a state without forming the `2^n` matrix.
/// The result is a raw amplitude vector (norm may differ from 1).
pub fn apply_local(state: &PureState, op: &DenseOperator) -> Result<Vec<C64>> {
    if let Some(&q) = op.support().iter().find(|&&q| q >= state.n_qubits()) {
        return Err(Error::Dimension {
            context: "apply_local support",
            expected: state.n_qubits(),
            found: q + 1,
        });
    }
    let mut out = vec![C64::ZERO; state.dim()];
    apply_on_support(
        op.matrix(),
        op.support(),
        state.n_qubits(),
        state.amplitudes(),
        &mut out,
        C64::ONE,
        false,
    );
    Ok(out)
}

/// Same kernel on raw slices; used by the evolution hot paths.
pub(crate) fn apply_local_raw(
    op: &DenseOperator,
    n: usize,
    x: &[C64],
    y: &mut [C64],
    scale: C64,
    accumulate: bool,
) {
    apply_on_support(op.matrix(), op.support(), n, x, y, scale, accumulate);
}
