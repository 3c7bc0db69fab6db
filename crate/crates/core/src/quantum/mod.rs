//! Complex linear algebra over qubit tensor products.
//!
//! Qubit 0 is the most significant tensor factor everywhere: basis index
//! `b` carries the bit of qubit `q` at position `n - 1 - q`.

mod density;
mod norms;
mod operator;
mod state;

pub use density::{partial_trace_state, transition_matrix, DensityMatrix};
pub use norms::{
    operator_norm, operator_norm_power, self_adjoint_norm, trace_norm, PowerIterOptions,
};
pub(crate) use norms::matvec as matvec_dense;
pub use operator::{haar_truncate, kron_embed, DenseOperator};
pub use state::{apply_local, PureState};

use crate::C64;
use faer::Mat;

/// Maps (sub-index on a qubit subset, env-index on the rest) pairs to
/// full basis indices, honoring the MSB-first qubit convention.
pub(crate) struct SupportIndexer {
    /// Full-index bit shift of each support qubit, support order.
    sub_shifts: Vec<u32>,
    /// Full-index bit shift of each environment qubit, ascending qubit order.
    env_shifts: Vec<u32>,
}

impl SupportIndexer {
    /// `support` must be strictly increasing and within `0..n`.
    pub(crate) fn new(support: &[usize], n: usize) -> Self {
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(support.iter().all(|&q| q < n));
        let sub_shifts = support.iter().map(|&q| (n - 1 - q) as u32).collect();
        let env_shifts = (0..n)
            .filter(|q| !support.contains(q))
            .map(|q| (n - 1 - q) as u32)
            .collect();
        SupportIndexer { sub_shifts, env_shifts }
    }

    pub(crate) fn sub_dim(&self) -> usize {
        1 << self.sub_shifts.len()
    }

    pub(crate) fn env_dim(&self) -> usize {
        1 << self.env_shifts.len()
    }

    /// Spread a sub-index (first support qubit = MSB) onto its full-index bits.
    pub(crate) fn spread_sub(&self, sub: usize) -> usize {
        let k = self.sub_shifts.len();
        let mut idx = 0;
        for (j, &sh) in self.sub_shifts.iter().enumerate() {
            idx |= ((sub >> (k - 1 - j)) & 1) << sh;
        }
        idx
    }

    /// Spread an environment index onto its full-index bits.
    pub(crate) fn spread_env(&self, env: usize) -> usize {
        let m = self.env_shifts.len();
        let mut idx = 0;
        for (j, &sh) in self.env_shifts.iter().enumerate() {
            idx |= ((env >> (m - 1 - j)) & 1) << sh;
        }
        idx
    }

    /// All `spread_sub` values, table form.
    pub(crate) fn sub_table(&self) -> Vec<usize> {
        (0..self.sub_dim()).map(|s| self.spread_sub(s)).collect()
    }

    /// All `spread_env` values, table form.
    pub(crate) fn env_table(&self) -> Vec<usize> {
        (0..self.env_dim()).map(|e| self.spread_env(e)).collect()
    }
}

/// y = scale * (mat ⊗ 1_env) x, with `mat` acting on `support`.
/// With `accumulate` the result is added onto `y` instead.
pub(crate) fn apply_on_support(
    mat: &Mat<C64>,
    support: &[usize],
    n: usize,
    x: &[C64],
    y: &mut [C64],
    scale: C64,
    accumulate: bool,
) {
    let indexer = SupportIndexer::new(support, n);
    let d = indexer.sub_dim();
    debug_assert_eq!(mat.nrows(), d);
    debug_assert_eq!(x.len(), 1usize << n);
    let subs = indexer.sub_table();
    let mut gathered = vec![C64::ZERO; d];
    for env in 0..indexer.env_dim() {
        let base = indexer.spread_env(env);
        for (s, &off) in subs.iter().enumerate() {
            gathered[s] = x[base | off];
        }
        for (r, &off) in subs.iter().enumerate() {
            let mut acc = C64::ZERO;
            for (s, &g) in gathered.iter().enumerate() {
                acc += mat[(r, s)] * g;
            }
            let out = base | off;
            if accumulate {
                y[out] += scale * acc;
            } else {
                y[out] = scale * acc;
            }
        }
    }
}

/// `apply_on_support` taking the matrix and support from an operator.
pub(crate) fn apply_term_raw(
    op: &DenseOperator,
    n: usize,
    x: &[C64],
    y: &mut [C64],
    scale: C64,
    accumulate: bool,
) {
    apply_on_support(op.matrix(), op.support(), n, x, y, scale, accumulate);
}

pub(crate) fn indexer_for(support: &[usize], n: usize) -> SupportIndexer {
    SupportIndexer::new(support, n)
}

/// Partial trace of a `2^n`-dimensional operator onto the `keep` qubits.
pub(crate) fn partial_trace_matrix(mat: &Mat<C64>, n: usize, keep: &[usize]) -> Mat<C64> {
    let indexer = SupportIndexer::new(keep, n);
    let d = indexer.sub_dim();
    let subs = indexer.sub_table();
    let envs = indexer.env_table();
    let mut out = Mat::<C64>::zeros(d, d);
    for &e in &envs {
        for (i, &oi) in subs.iter().enumerate() {
            for (j, &oj) in subs.iter().enumerate() {
                out[(i, j)] += mat[(e | oi, e | oj)];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexer_msb_convention() {
        // 3 qubits, support {1}: sub bit sits at full-index bit 1.
        let ix = SupportIndexer::new(&[1], 3);
        assert_eq!(ix.spread_sub(1), 0b010);
        // env qubits {0, 2}: env index 0b10 means qubit 0 set.
        assert_eq!(ix.spread_env(0b10), 0b100);
        assert_eq!(ix.spread_env(0b01), 0b001);
    }

    #[test]
    fn indexer_roundtrip_covers_all_indices() {
        let ix = SupportIndexer::new(&[0, 2], 4);
        let mut seen = std::collections::HashSet::new();
        for s in 0..ix.sub_dim() {
            for e in 0..ix.env_dim() {
                assert!(seen.insert(ix.spread_sub(s) | ix.spread_env(e)));
            }
        }
        assert_eq!(seen.len(), 16);
    }
}
