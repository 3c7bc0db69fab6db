//! Closed-form evaluation of the light-cone inequalities and constants.
//!
//! Pure formula layer: no simulation, no state. All logarithms are
//! base 2, so every information quantity is in bits. The constants
//! (c, v, xi) are experiment inputs — nothing here invents defaults.

use crate::error::{Error, Result};

/// Prefactor, velocity and decay length of the commutator bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LRConstants {
    pub c: f64,
    /// Velocity in edges per unit time.
    pub v: f64,
    /// Decay length in edges.
    pub xi: f64,
}

impl LRConstants {
    pub fn new(c: f64, v: f64, xi: f64) -> Result<Self> {
        if c <= 0.0 || v <= 0.0 || xi <= 0.0 {
            return Err(Error::domain(format!(
                "light-cone constants must be positive, got c={c}, v={v}, xi={xi}"
            )));
        }
        Ok(LRConstants { c, v, xi })
    }
}

/// Prefactor and correlation length of an exponentially clustering state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationDecay {
    pub c_tilde: f64,
    /// Correlation length in edges.
    pub chi: f64,
}

impl CorrelationDecay {
    pub fn new(c_tilde: f64, chi: f64) -> Result<Self> {
        if c_tilde <= 0.0 || chi <= 0.0 {
            return Err(Error::domain(format!(
                "correlation-decay parameters must be positive, got c_tilde={c_tilde}, chi={chi}"
            )));
        }
        Ok(CorrelationDecay { c_tilde, chi })
    }
}

/// Commutator bound for unit-norm observables:
/// `c * n_min * exp(-(L - v|t|)/xi)`.
pub fn lr_bound(k: &LRConstants, n_min: usize, l: f64, t: f64) -> f64 {
    k.c * n_min as f64 * (-(l - k.v * t.abs()) / k.xi).exp()
}

/// Error of restricting a Heisenberg-evolved observable to the
/// distance-`l` neighborhood of its support:
/// `c * |A| * exp(-(l - v|t|)/xi)`.
pub fn truncation_bound(k: &LRConstants, size_a: usize, l: f64, t: f64) -> f64 {
    lr_bound(k, size_a, l, t)
}

/// Cut distance minimizing the combined truncation + clustering bound:
/// `l = (chi*v*t + xi*L) / (chi + 2 xi)`.
pub fn optimal_cut(chi: f64, xi: f64, v: f64, t: f64, l_distance: f64) -> f64 {
    (chi * v * t + xi * l_distance) / (chi + 2.0 * xi)
}

/// Connected-correlation spread bound
/// `c_bar * (|A| + |B|) * exp(-(L - 2 v t)/chi')` with `chi' = chi + 2 xi`.
#[derive(Debug, Clone, Copy)]
pub struct SpreadBound {
    pub c_bar: f64,
    pub chi_prime: f64,
}

impl SpreadBound {
    /// `chi' = chi + 2 xi` is enforced here rather than taken on trust.
    pub fn new(c_bar: f64, decay: &CorrelationDecay, k: &LRConstants) -> Result<Self> {
        if c_bar <= 0.0 {
            return Err(Error::domain("spread prefactor must be positive"));
        }
        Ok(SpreadBound { c_bar, chi_prime: decay.chi + 2.0 * k.xi })
    }

    pub fn eval(&self, size_a: usize, size_b: usize, l: f64, v: f64, t: f64) -> f64 {
        self.c_bar * (size_a + size_b) as f64 * (-(l - 2.0 * v * t) / self.chi_prime).exp()
    }
}

/// Free-standing form of the correlation spread bound.
pub fn correlation_spread_bound(
    c_bar: f64,
    chi_prime: f64,
    size_a: usize,
    size_b: usize,
    l: f64,
    v: f64,
    t: f64,
) -> f64 {
    c_bar * (size_a + size_b) as f64 * (-(l - 2.0 * v * t) / chi_prime).exp()
}

/// Entropy-continuity bound with a validity flag. The `-delta log delta`
/// form is standard for `delta <= 1/e`; outside that window the value is
/// still reported, flagged rather than refused.
#[derive(Debug, Clone, Copy)]
pub struct FannesBound {
    pub bits: f64,
    /// False when delta exceeds 1/e.
    pub within_validity: bool,
}

/// `delta * n_b * log2(m) - delta * log2(delta)` for a trace-norm
/// distance `delta` on an `n_b`-site block of local dimension `m`.
pub fn fannes_bound(delta: f64, n_b: usize, m: usize) -> Result<FannesBound> {
    if !(0.0..=2.0).contains(&delta) {
        return Err(Error::domain(format!(
            "trace-norm distance must lie in [0, 2], got {delta}"
        )));
    }
    if m < 2 {
        return Err(Error::domain("local dimension must be at least 2"));
    }
    let bits = if delta == 0.0 {
        0.0
    } else {
        delta * n_b as f64 * (m as f64).log2() - delta * delta.log2()
    };
    Ok(FannesBound { bits, within_validity: delta <= std::f64::consts::E.recip() })
}

/// Signalling capacity bound `2 eps (n_b log2 m - log2 eps)` in bits.
/// `eps = 0` returns the limit value 0.
pub fn capacity_bound(eps: f64, n_b: usize, m: usize) -> Result<f64> {
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::domain(format!(
            "trace-norm epsilon must lie in [0, 2], got {eps}"
        )));
    }
    if m < 2 {
        return Err(Error::domain("local dimension must be at least 2"));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * eps * (n_b as f64 * (m as f64).log2() - eps.log2()))
}

/// Entangling-rate objective `f(x) = 2 sqrt(x(1-x)) log2(x/(1-x))`.
pub fn entangling_rate_objective(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    2.0 * (x * (1.0 - x)).sqrt() * (x / (1.0 - x)).log2()
}

/// Maximal entangling rate of a norm-1 product interaction, in bits per
/// unit time, together with the maximizing Schmidt weight.
pub fn cstar_point() -> (f64, f64) {
    // f is unimodal on (1/2, 1); golden-section search to 1e-10.
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.5, 1.0 - 1e-12);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (entangling_rate_objective(c), entangling_rate_objective(d));
    while b - a > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = entangling_rate_objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = entangling_rate_objective(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, entangling_rate_objective(x))
}

/// The entangling-rate constant c* ≈ 1.9123 bits per unit time.
pub fn cstar() -> f64 {
    cstar_point().1
}

/// Instantaneous entropy-rate budget `c* * sum_k |r_k|` in bits/time.
pub fn entropy_rate_bound(schedule_magnitudes: &[f64]) -> f64 {
    cstar() * schedule_magnitudes.iter().map(|r| r.abs()).sum::<f64>()
}

/// Integrated perimeter-law budget `c* * g * P * t` in bits.
pub fn entropy_budget(g: f64, perimeter_terms: usize, t: f64) -> f64 {
    cstar() * g * perimeter_terms as f64 * t
}

/// Accuracy propagated back from a final `(l_f, eps_f)` topological-order
/// certificate through time-`t` evolution:
/// `eps_f + l_f^(d-1) * exp(-(l_f/2 - v t)/xi)`.
///
/// The order constant is fixed at 1, so this is a shape, not a certified
/// bound.
pub fn tqo_epsilon_propagation(eps_f: f64, l_f: f64, k: &LRConstants, t: f64, d: u32) -> Result<f64> {
    if l_f <= 0.0 {
        return Err(Error::domain("final diameter l_f must be positive"));
    }
    Ok(eps_f + l_f.powi(d as i32 - 1) * (-(l_f / 2.0 - k.v * t) / k.xi).exp())
}
