//! Lanczos exponential-times-vector for Hermitian matrix-free operators.

use crate::error::{Error, Result};
use crate::C64;
use faer::{Mat, Side};

#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Maximum Lanczos subspace dimension.
    pub max_dim: usize,
    /// Residual target for early exit / substep control.
    pub tol: f64,
    pub max_substeps: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions { max_dim: 30, tol: 1e-10, max_substeps: 100_000 }
    }
}

/// Computes exp(-i * H * duration) v for Hermitian H given only its
/// action. Splits the interval adaptively whenever the Lanczos residual
/// estimate exceeds the tolerance. Negative durations give the adjoint.
pub fn krylov_expv(
    mut matvec: impl FnMut(&[C64], &mut [C64]),
    v: &[C64],
    duration: f64,
    opts: KrylovOptions,
) -> Result<Vec<C64>> {
    let dim = v.len();
    let norm0 = norm(v);
    if norm0 < 1e-300 || duration == 0.0 {
        return Ok(v.to_vec());
    }
    let mut state = v.to_vec();
    let mut remaining = duration;
    let sign = duration.signum();
    let mut substeps = 0usize;
    while remaining.abs() > 1e-15 {
        substeps += 1;
        if substeps > opts.max_substeps {
            return Err(Error::Backend(format!(
                "Krylov propagation exceeded {} substeps",
                opts.max_substeps
            )));
        }
        let beta = norm(&state);
        if beta < 1e-300 {
            return Ok(state);
        }
        // Build the Lanczos basis from the current state.
        let m_max = opts.max_dim.min(dim);
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max);
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        basis.push(scaled(&state, 1.0 / beta));
        let mut w = vec![C64::ZERO; dim];
        let mut happy = false;
        for j in 0..m_max {
            matvec(&basis[j], &mut w);
            let alpha = inner(&basis[j], &w).re;
            alphas.push(alpha);
            axpy(&mut w, &basis[j], -C64::new(alpha, 0.0));
            if j > 0 {
                let b = betas[j - 1];
                axpy_from(&mut w, &basis[j - 1], -C64::new(b, 0.0));
            }
            // Full re-orthogonalization; the subspace is small.
            for prior in &basis {
                let c = inner(prior, &w);
                axpy_from(&mut w, prior, -c);
            }
            let b = norm(&w);
            if b < 1e-12 * beta.max(1.0) {
                happy = true;
                break;
            }
            if basis.len() < m_max {
                betas.push(b);
                basis.push(scaled(&w, 1.0 / b));
            } else {
                betas.push(b); // trailing beta kept for the residual estimate
                break;
            }
        }
        let m = alphas.len();

        // Small tridiagonal eigendecomposition (real symmetric).
        let t_mat = Mat::from_fn(m, m, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j || j + 1 == i {
                betas[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = t_mat
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Backend(format!("tridiagonal eigendecomposition: {e:?}")))?;
        let q = eig.U();
        let lam: Vec<f64> = eig.S().column_vector().iter().copied().collect();

        // Pick the largest substep with an acceptable residual estimate.
        let trailing_beta = if happy || betas.len() < m { 0.0 } else { betas[m - 1] };
        let mut tau = remaining;
        let y = loop {
            let y = expv_small(q, &lam, m, tau, beta);
            let err = trailing_beta * y[m - 1].norm();
            if err <= opts.tol * beta.max(1.0) || tau.abs() < 1e-12 {
                break y;
            }
            tau *= 0.5;
        };

        // state = sum_j y_j basis_j.
        let mut next = vec![C64::ZERO; dim];
        for (j, b) in basis.iter().enumerate() {
            axpy_from(&mut next, b, y[j]);
        }
        state = next;
        remaining -= tau;
        // Guard against sign flip from accumulated subtraction error.
        if remaining.signum() != sign && remaining.abs() > 1e-15 {
            break;
        }
    }
    Ok(state)
}

/// y = Q exp(-i tau Lambda) Q^T (beta e_1) for the small real eigensystem.
fn expv_small(q: faer::MatRef<'_, f64>, lam: &[f64], m: usize, tau: f64, beta: f64) -> Vec<C64> {
    let mut y = vec![C64::ZERO; m];
    for k in 0..m {
        let phase = C64::new(0.0, -lam[k] * tau).exp();
        let coeff = phase * C64::new(beta * q[(0, k)], 0.0);
        for i in 0..m {
            y[i] += C64::new(q[(i, k)], 0.0) * coeff;
        }
    }
    y
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn scaled(v: &[C64], s: f64) -> Vec<C64> {
    v.iter().map(|a| a * s).collect()
}

fn axpy(w: &mut [C64], v: &[C64], c: C64) {
    for (wi, vi) in w.iter_mut().zip(v) {
        *wi += c * vi;
    }
}

fn axpy_from(w: &mut [C64], v: &[C64], c: C64) {
    for (wi, vi) in w.iter_mut().zip(v) {
        *wi += c * vi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> Mat<C64> {
        let a = Mat::from_fn(dim, dim, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        (&a + a.adjoint().to_owned()) * faer::Scale(C64::new(0.5, 0.0))
    }

    #[test]
    fn matches_dense_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dim = 48;
        let h = random_hermitian(dim, &mut rng);
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let t = 1.3;

        let fast = krylov_expv(
            |x, y| crate::quantum::matvec_dense(&h, x, y),
            &v,
            t,
            KrylovOptions::default(),
        )
        .unwrap();

        // Dense oracle through the full eigendecomposition.
        let eig = h.self_adjoint_eigen(Side::Lower).unwrap();
        let u = eig.U();
        let lam: Vec<f64> = eig.S().column_vector().iter().map(|c| c.re).collect();
        let mut coeff = vec![C64::ZERO; dim];
        for j in 0..dim {
            let mut acc = C64::ZERO;
            for i in 0..dim {
                acc += u[(i, j)].conj() * v[i];
            }
            coeff[j] = acc * C64::new(0.0, -lam[j] * t).exp();
        }
        let mut slow = vec![C64::ZERO; dim];
        for j in 0..dim {
            for i in 0..dim {
                slow[i] += u[(i, j)] * coeff[j];
            }
        }

        let dist: f64 = fast
            .iter()
            .zip(&slow)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-8, "krylov vs dense distance {dist}");
    }

    #[test]
    fn preserves_norm_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let dim = 64;
        let h = random_hermitian(dim, &mut rng);
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let nv = norm(&v);
        let fwd = krylov_expv(
            |x, y| crate::quantum::matvec_dense(&h, x, y),
            &v,
            2.0,
            KrylovOptions::default(),
        )
        .unwrap();
        assert!((norm(&fwd) - nv).abs() < 1e-9);
        let back = krylov_expv(
            |x, y| crate::quantum::matvec_dense(&h, x, y),
            &fwd,
            -2.0,
            KrylovOptions::default(),
        )
        .unwrap();
        let dist: f64 = back
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-8);
    }

    #[test]
    fn zero_vector_passthrough() {
        let out = krylov_expv(
            |_x, y| y.iter_mut().for_each(|c| *c = C64::ZERO),
            &[C64::ZERO; 8],
            1.0,
            KrylovOptions::default(),
        )
        .unwrap();
        assert!(out.iter().all(|c| *c == C64::ZERO));
    }
}
