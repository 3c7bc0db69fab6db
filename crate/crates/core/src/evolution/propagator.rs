//! Segment propagator: exact exponentials per constant-schedule segment.

use super::{krylov_expv, KrylovOptions, PathSelect};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::C64;
use faer::{Mat, Side};
use std::collections::HashMap;

struct DenseEig {
    vectors: Mat<C64>,
    values: Vec<f64>,
}

/// Applies U(t0 -> t1) and its adjoint for one Hamiltonian, caching the
/// dense eigendecomposition per distinct schedule-value vector.
pub struct Propagator<'a> {
    h: &'a HamiltonianSpec,
    path: PathSelect,
    dense_cache: HashMap<Vec<u64>, DenseEig>,
    krylov_opts: KrylovOptions,
}

impl<'a> Propagator<'a> {
    pub fn new(h: &'a HamiltonianSpec, path: PathSelect) -> Result<Self> {
        if path == PathSelect::Auto {
            return Err(Error::domain("Propagator::new needs a resolved path"));
        }
        Ok(Propagator { h, path, dense_cache: HashMap::new(), krylov_opts: KrylovOptions::default() })
    }

    /// Constant-schedule segments covering [t0, t1].
    fn segments(&self, t0: f64, t1: f64) -> Vec<(f64, f64)> {
        if t1 <= t0 {
            return Vec::new();
        }
        let mut cuts = vec![t0];
        cuts.extend(self.h.breakpoints_in(t0, t1));
        cuts.push(t1);
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    fn dense_eig(&mut self, t_mid: f64) -> Result<&DenseEig> {
        let key: Vec<u64> = self.h.schedule_values(t_mid).iter().map(|v| v.to_bits()).collect();
        if !self.dense_cache.contains_key(&key) {
            let m = self.h.assemble_dense(t_mid)?;
            let eig = m
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::Backend(format!("Hamiltonian eigendecomposition: {e:?}")))?;
            let values = eig.S().column_vector().iter().map(|c| c.re).collect();
            self.dense_cache.insert(key.clone(), DenseEig { vectors: eig.U().to_owned(), values });
        }
        Ok(self.dense_cache.get(&key).unwrap())
    }

    /// exp(-i H(t_mid) * duration) v in the cached eigenbasis.
    fn dense_segment(&mut self, v: &[C64], t_mid: f64, duration: f64) -> Result<Vec<C64>> {
        let eig = self.dense_eig(t_mid)?;
        let dim = v.len();
        // c = V† v.
        let mut coeff = vec![C64::ZERO; dim];
        for j in 0..dim {
            let col = eig.vectors.col_as_slice(j);
            let mut acc = C64::ZERO;
            for i in 0..dim {
                acc += col[i].conj() * v[i];
            }
            coeff[j] = acc;
        }
        // c_j *= e^{-i lambda_j duration}; out = V c.
        for (c, &l) in coeff.iter_mut().zip(&eig.values) {
            let phase = C64::new(0.0, -l * duration).exp();
            *c *= phase;
        }
        let mut out = vec![C64::ZERO; dim];
        for j in 0..dim {
            let col = eig.vectors.col_as_slice(j);
            let cj = coeff[j];
            if cj == C64::ZERO {
                continue;
            }
            for i in 0..dim {
                out[i] += col[i] * cj;
            }
        }
        Ok(out)
    }

    fn krylov_segment(&mut self, v: &[C64], t_mid: f64, duration: f64) -> Result<Vec<C64>> {
        let h = self.h;
        krylov_expv(
            |x, y| h.matvec(t_mid, x, y).expect("validated dimensions"),
            v,
            duration,
            self.krylov_opts,
        )
    }

    fn segment_apply(&mut self, v: &[C64], t_mid: f64, duration: f64) -> Result<Vec<C64>> {
        match self.path {
            PathSelect::Dense => self.dense_segment(v, t_mid, duration),
            PathSelect::Krylov => self.krylov_segment(v, t_mid, duration),
            PathSelect::Auto => unreachable!("path resolved at construction"),
        }
    }

    /// U(t0 -> t1) v. Inside a constant segment the midpoint-rule step
    /// factors commute, so the segment exponential is applied whole; the
    /// step size `_dt` only matters through the halving check upstream.
    pub fn evolve_vec(&mut self, v: &[C64], t0: f64, t1: f64, _dt: f64) -> Result<Vec<C64>> {
        let mut state = v.to_vec();
        for (a, b) in self.segments(t0, t1) {
            state = self.segment_apply(&state, 0.5 * (a + b), b - a)?;
        }
        Ok(state)
    }

    /// U(t0 -> t1)† v: segment exponentials in reverse order, conjugated.
    pub fn evolve_vec_adjoint(&mut self, v: &[C64], t0: f64, t1: f64, _dt: f64) -> Result<Vec<C64>> {
        let mut state = v.to_vec();
        for (a, b) in self.segments(t0, t1).into_iter().rev() {
            state = self.segment_apply(&state, 0.5 * (a + b), -(b - a))?;
        }
        Ok(state)
    }

    /// Dense unitary U(t0 -> t1) as a matrix.
    pub fn unitary(&mut self, t0: f64, t1: f64, _dt: f64) -> Result<Mat<C64>> {
        if self.path != PathSelect::Dense {
            return Err(Error::domain("unitary assembly requires the dense path"));
        }
        let dim = 1usize << self.h.n_qubits();
        let mut u = Mat::<C64>::identity(dim, dim);
        for (a, b) in self.segments(t0, t1) {
            let eig = self.dense_eig(0.5 * (a + b))?;
            let duration = b - a;
            // E = V diag(e^{-i lambda duration}) V†; U <- E U.
            let phases: Vec<C64> = eig
                .values
                .iter()
                .map(|&l| C64::new(0.0, -l * duration).exp())
                .collect();
            let vh_u = eig.vectors.adjoint() * &u;
            let mut scaled = vh_u;
            for i in 0..dim {
                let p = phases[i];
                for j in 0..dim {
                    scaled[(i, j)] *= p;
                }
            }
            u = &eig.vectors * scaled;
        }
        Ok(u)
    }
}
