//! Operator norms: exact dense paths and matrix-free power iteration.

use crate::error::{Error, Result};
use crate::C64;
use faer::{Mat, Side};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Largest singular value via dense SVD (exact path).
pub fn operator_norm(mat: &Mat<C64>) -> f64 {
    if mat.nrows() == 0 {
        return 0.0;
    }
    mat.singular_values()
        .map(|s| s.first().copied().unwrap_or(0.0))
        .unwrap_or_else(|_| {
            // SVD failure on finite input is pathological; the Frobenius
            // norm still upper-bounds the spectral norm.
            frobenius(mat)
        })
}

/// Sum of singular values ||.||_1.
pub fn trace_norm(mat: &Mat<C64>) -> f64 {
    if mat.nrows() == 0 {
        return 0.0;
    }
    mat.singular_values().map(|s| s.iter().sum()).unwrap_or(f64::NAN)
}

/// Spectral norm of a Hermitian matrix, max |eigenvalue|. Exact and
/// cheaper than the SVD; agrees with `operator_norm` on Hermitian input.
pub fn self_adjoint_norm(mat: &Mat<C64>) -> f64 {
    match mat.self_adjoint_eigenvalues(Side::Lower) {
        Ok(evs) => evs.iter().fold(0.0f64, |m, &l| m.max(l.abs())),
        Err(_) => frobenius(mat),
    }
}

fn frobenius(mat: &Mat<C64>) -> f64 {
    let mut s = 0.0;
    for j in 0..mat.ncols() {
        for i in 0..mat.nrows() {
            s += mat[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct PowerIterOptions {
    /// Relative tolerance on the singular-value estimate.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed for the random start vector.
    pub seed: u64,
}

impl Default for PowerIterOptions {
    fn default() -> Self {
        PowerIterOptions { tol: 1e-8, max_iter: 10_000, seed: 0x9e3779b9 }
    }
}

/// Largest singular value of a matrix-free operator, by power iteration
/// on A†A. Returns a certified lower bound: every reported value is
/// ||A v|| for some unit vector v. Non-convergence is an error that
/// still carries the best estimate.
pub fn operator_norm_power(
    dim: usize,
    mut apply: impl FnMut(&[C64], &mut [C64]),
    mut apply_adjoint: impl FnMut(&[C64], &mut [C64]),
    opts: PowerIterOptions,
) -> Result<f64> {
    if dim == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    normalize(&mut v);
    let mut w = vec![C64::ZERO; dim];
    let mut z = vec![C64::ZERO; dim];
    let mut sigma = 0.0f64;
    for iter in 0..opts.max_iter {
        apply(&v, &mut w);
        let new_sigma = norm(&w);
        if new_sigma < 1e-300 {
            return Ok(0.0); // operator annihilates the iterate: zero to working precision
        }
        apply_adjoint(&w, &mut z);
        let zn = norm(&z);
        if zn < 1e-300 {
            return Ok(new_sigma);
        }
        for (vi, zi) in v.iter_mut().zip(&z) {
            *vi = zi / C64::new(zn, 0.0);
        }
        let rel = (new_sigma - sigma).abs() / new_sigma.max(1e-300);
        sigma = new_sigma;
        if iter > 0 && rel <= opts.tol {
            return Ok(sigma);
        }
    }
    Err(Error::NonConvergence { estimate: sigma, iterations: opts.max_iter })
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let n = norm(v);
    if n > 0.0 {
        for a in v.iter_mut() {
            *a /= C64::new(n, 0.0);
        }
    }
}

/// Convenience: power-iteration norm of a dense matrix.
pub fn operator_norm_power_dense(mat: &Mat<C64>, opts: PowerIterOptions) -> Result<f64> {
    let dim = mat.nrows();
    let adj = mat.adjoint().to_owned();
    operator_norm_power(
        dim,
        |x, y| matvec(mat, x, y),
        |x, y| matvec(&adj, x, y),
        opts,
    )
}

pub(crate) fn matvec(mat: &Mat<C64>, x: &[C64], y: &mut [C64]) {
    let (m, n) = (mat.nrows(), mat.ncols());
    for yi in y.iter_mut() {
        *yi = C64::ZERO;
    }
    for j in 0..n {
        let xj = x[j];
        if xj == C64::ZERO {
            continue;
        }
        let col = mat.col_as_slice(j);
        for i in 0..m {
            y[i] += col[i] * xj;
        }
    }
}
