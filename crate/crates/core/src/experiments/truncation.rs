//! Light-cone truncation of Heisenberg operators: how well O_A(t) is
//! approximated inside the distance-l neighborhood of A.

use super::grid::ExperimentResult;
use crate::error::{Error, Result};
use crate::evolution::{heisenberg_operator, PropagatorPlan};
use crate::hamiltonian::HamiltonianSpec;
use crate::lattice::Region;
use crate::quantum::{haar_truncate, self_adjoint_norm, DenseOperator};

/// Dense Heisenberg operators are required here.
pub const TRUNCATION_QUBIT_LIMIT: usize = 10;

/// || O_A(t) - O_A^l(t) || per cut distance l.
#[derive(Debug, Clone)]
pub struct TruncationTable {
    pub t: f64,
    pub l_values: Vec<usize>,
    pub errors: Vec<f64>,
}

impl TruncationTable {
    pub fn as_result(&self) -> ExperimentResult {
        let mut res = ExperimentResult::new("truncation", &["l", "t"]);
        for (li, &l) in self.l_values.iter().enumerate() {
            res.push(vec![l as f64, self.t], self.errors[li], None);
        }
        res
    }
}

/// Evolve `op_a` (supported inside `region_a`) to time t, then compare
/// against its normalized-identity truncation outside each light-cone
/// radius l: the truncated operator replaces the action on all spins at
/// distance >= l from A. An empty outside set gives error 0.
pub fn truncation_scan(
    h: &HamiltonianSpec,
    region_a: &Region,
    op_a: &DenseOperator,
    t: f64,
    l_values: &[usize],
    plan: &PropagatorPlan,
) -> Result<TruncationTable> {
    let n = h.n_qubits();
    if n > TRUNCATION_QUBIT_LIMIT {
        return Err(Error::Capability {
            what: "truncation_scan",
            requested: n,
            limit: TRUNCATION_QUBIT_LIMIT,
        });
    }
    if !op_a.support().iter().all(|q| region_a.contains(*q)) {
        return Err(Error::domain("observable support must lie inside region A"));
    }
    if !l_values.windows(2).all(|w| w[0] < w[1]) || l_values.is_empty() {
        return Err(Error::domain("l grid must be nonempty and strictly increasing"));
    }
    let evolved = heisenberg_operator(h, op_a, t, plan)?;
    let dist = h.graph().distances_from(region_a.vertices());
    let mut errors = Vec::with_capacity(l_values.len());
    for &l in l_values {
        let outside: Vec<usize> = (0..n).filter(|&v| dist[v] >= l).collect();
        if outside.is_empty() {
            errors.push(0.0);
            continue;
        }
        let truncated = haar_truncate(&evolved, &outside)?;
        let diff = evolved.matrix() - truncated.matrix();
        errors.push(self_adjoint_norm(&diff));
    }
    Ok(TruncationTable { t, l_values: l_values.to_vec(), errors })
}
