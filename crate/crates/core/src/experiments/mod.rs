//! Orchestrated numerical experiments confronting simulation data with
//! the closed-form bounds.

mod correlation;
mod entropy;
mod grid;
mod holevo;
mod lightcone;
mod protocols;
mod stats;
mod tqo;
mod truncation;

pub use correlation::{correlation_spread, CorrelationTrajectory};
pub use entropy::{
    entropy_growth, integrated_budget_bits, random_rate_sweep, xx_optimal_input,
    EntropyTrajectory, RateSweepOutcome,
};
pub use grid::{ExperimentResult, Pauli, ResultRow, ScanGrid};
pub use holevo::{holevo_experiment, pauli_ensemble_2q, HolevoPoint};
pub use lightcone::{
    fit_lightcone, lightcone_scan, CommutatorTable, LightconeFit, ScanOpts, ScanPath,
};
pub use protocols::{
    circuit_lower_bound_demo, ghz_protocol, ghz_protocol_check, random_local_circuit,
    toric_prep_protocol, Gate, GhzRow, LowerBoundReport, Protocol,
};
pub use stats::{least_squares, LineFit};
pub use tqo::{tqo_accuracy, TqoReport};
pub use truncation::{truncation_scan, TruncationTable};
