//! Scan grids and the tabular result type all experiments emit.

use crate::error::{Error, Result};

/// Distances and times to scan, plus the Pauli observables at both ends.
#[derive(Debug, Clone)]
pub struct ScanGrid {
    pub l_values: Vec<usize>,
    pub t_values: Vec<f64>,
    pub obs_a: Pauli,
    pub obs_b: Pauli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn operator(self, qubit: usize) -> crate::quantum::DenseOperator {
        match self {
            Pauli::X => crate::quantum::DenseOperator::pauli_x(qubit),
            Pauli::Y => crate::quantum::DenseOperator::pauli_y(qubit),
            Pauli::Z => crate::quantum::DenseOperator::pauli_z(qubit),
        }
    }
}

impl std::str::FromStr for Pauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(Error::domain(format!("unknown Pauli '{other}'"))),
        }
    }
}

impl ScanGrid {
    pub fn new(l_values: Vec<usize>, t_values: Vec<f64>, obs_a: Pauli, obs_b: Pauli) -> Result<Self> {
        if l_values.is_empty() || t_values.is_empty() {
            return Err(Error::domain("scan grids must be nonempty"));
        }
        if !l_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("L grid must be strictly increasing"));
        }
        if !t_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("t grid must be strictly increasing"));
        }
        Ok(ScanGrid { l_values, t_values, obs_a, obs_b })
    }
}

/// One grid point of an experiment table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    /// Parameter values, matching the `columns` of the parent result.
    pub params: Vec<f64>,
    pub value: f64,
    pub error_estimate: Option<f64>,
}

/// Tabular experiment outcome plus metadata, ready for CSV emission.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub experiment: String,
    /// Names of the parameter columns (e.g. ["L", "t"]).
    pub columns: Vec<String>,
    pub rows: Vec<ResultRow>,
    /// Free-form key/value metadata (fits, caps, flags).
    pub meta: Vec<(String, String)>,
}

impl ExperimentResult {
    pub fn new(experiment: impl Into<String>, columns: &[&str]) -> Self {
        ExperimentResult {
            experiment: experiment.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push(&mut self, params: Vec<f64>, value: f64, error_estimate: Option<f64>) {
        debug_assert_eq!(params.len(), self.columns.len());
        self.rows.push(ResultRow { params, value, error_estimate });
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }
}
