//! Spin-lattice dynamics and light-cone bound verification.
//!
//! Simulates time evolution of qubit systems on graphs (exact
//! diagonalization up to 12 qubits, Krylov propagation up to 20) and
//! confronts the measured commutator spreading, signalling capacity,
//! correlation growth, entanglement rates and topological-order
//! accuracy with the corresponding closed-form bounds.
//!
//! Conventions used throughout:
//! - qubit 0 is the most significant tensor factor,
//! - entropies and logarithms are base 2 (bits),
//! - time is in units of inverse energy (hbar = 1).

pub mod bounds;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod hamiltonian;
pub mod lattice;
pub mod quantum;

pub use error::{Error, Result};
pub use lattice::{Region, SpinGraph, ToricLayout};
pub use quantum::{DenseOperator, DensityMatrix, PureState};

/// Complex scalar shared by all dense linear algebra.
pub type C64 = num_complex::Complex64;
