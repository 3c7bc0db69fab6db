//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector/matrix/qubit-count mismatch.
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    /// Request exceeds a hard size limit of the chosen code path.
    #[error("{what}: {requested} qubits exceeds the {limit}-qubit capability limit")]
    Capability {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// Power iteration stalled; `estimate` is still a certified lower bound.
    #[error("power iteration did not converge after {iterations} iterations (best estimate {estimate:.6e})")]
    NonConvergence { estimate: f64, iterations: usize },

    /// Step-halving never brought successive propagations within tolerance.
    /// The last two iterates are kept for inspection.
    #[error("evolution did not converge under dt halving: |delta| = {delta:.3e} > tol = {tolerance:.3e} at dt = {dt:.3e}")]
    EvolveNonConverged {
        delta: f64,
        tolerance: f64,
        dt: f64,
        last_two: Box<(Vec<crate::C64>, Vec<crate::C64>)>,
    },

    /// A data fit could not be performed (degenerate or empty input).
    #[error("fit error: {0}")]
    Fit(String),

    /// Dense linear algebra backend failure (non-convergent eigensolver etc.).
    #[error("linear algebra error: {0}")]
    Backend(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
