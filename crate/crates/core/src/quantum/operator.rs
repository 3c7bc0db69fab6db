//! Dense operators on qubit subsets.

use super::{partial_trace_matrix, SupportIndexer};
use crate::error::{Error, Result};
use crate::C64;
use faer::Mat;

/// Dense complex matrix acting on an ordered list of qubits.
#[derive(Clone)]
pub struct DenseOperator {
    support: Vec<usize>,
    matrix: Mat<C64>,
}

impl std::fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DenseOperator")
            .field("support", &self.support)
            .field("dim", &self.dim())
            .finish()
    }
}

impl DenseOperator {
    /// `support` must be strictly increasing; `matrix` must be square of
    /// dimension `2^support.len()` with finite entries.
    pub fn new(support: Vec<usize>, matrix: Mat<C64>) -> Result<Self> {
        if !support.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("operator support must be strictly increasing"));
        }
        let dim = 1usize << support.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension {
                context: "DenseOperator::new",
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        for j in 0..dim {
            for i in 0..dim {
                if !matrix[(i, j)].re.is_finite() || !matrix[(i, j)].im.is_finite() {
                    return Err(Error::domain("operator entries must be finite"));
                }
            }
        }
        Ok(DenseOperator { support, matrix })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn n_qubits(&self) -> usize {
        self.support.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.matrix
    }

    /// Identity on the given qubits.
    pub fn identity(support: Vec<usize>) -> Self {
        let dim = 1usize << support.len();
        DenseOperator { support, matrix: Mat::identity(dim, dim) }
    }

    pub fn pauli_x(qubit: usize) -> Self {
        Self::single(qubit, [[0.0, 1.0], [1.0, 0.0]], [[0.0; 2]; 2])
    }

    pub fn pauli_y(qubit: usize) -> Self {
        Self::single(qubit, [[0.0; 2]; 2], [[0.0, -1.0], [1.0, 0.0]])
    }

    pub fn pauli_z(qubit: usize) -> Self {
        Self::single(qubit, [[1.0, 0.0], [0.0, -1.0]], [[0.0; 2]; 2])
    }

    fn single(qubit: usize, re: [[f64; 2]; 2], im: [[f64; 2]; 2]) -> Self {
        let matrix = Mat::from_fn(2, 2, |i, j| C64::new(re[i][j], im[i][j]));
        DenseOperator { support: vec![qubit], matrix }
    }

    /// Tensor product of operators with disjoint supports. The result
    /// lives on the sorted union of the supports.
    pub fn product(&self, other: &DenseOperator) -> Result<Self> {
        if self.support.iter().any(|q| other.support.contains(q)) {
            return Err(Error::domain("product requires disjoint supports"));
        }
        let mut union: Vec<usize> = self.support.iter().chain(&other.support).copied().collect();
        union.sort_unstable();
        let n_virtual = union.iter().max().map_or(0, |&q| q + 1);
        // Promote both factors into the union support by index surgery.
        let a = embed_matrix(&self.matrix, &self.support, &union, n_virtual);
        let b = embed_matrix(&other.matrix, &other.support, &union, n_virtual);
        Ok(DenseOperator { support: union, matrix: a * b })
    }

    pub fn scale(&self, factor: C64) -> Self {
        DenseOperator {
            support: self.support.clone(),
            matrix: &self.matrix * faer::Scale(factor),
        }
    }

    pub fn add(&self, other: &DenseOperator) -> Result<Self> {
        if self.support != other.support {
            return Err(Error::domain("operator addition requires identical supports"));
        }
        Ok(DenseOperator { support: self.support.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn matmul(&self, other: &DenseOperator) -> Result<Self> {
        if self.support != other.support {
            return Err(Error::domain("operator product requires identical supports"));
        }
        Ok(DenseOperator { support: self.support.clone(), matrix: &self.matrix * &other.matrix })
    }

    pub fn commutator(&self, other: &DenseOperator) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        Ok(DenseOperator { support: self.support.clone(), matrix: &ab.matrix - &ba.matrix })
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator { support: self.support.clone(), matrix: self.matrix.adjoint().to_owned() }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        for j in 0..d {
            for i in 0..d {
                if (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Largest singular value (dense, exact).
    pub fn norm(&self) -> f64 {
        super::operator_norm(&self.matrix)
    }
}

/// Embed `mat` (acting on `sub_support`) into the larger `support`
/// (identity on the extra qubits). Both supports use qubit labels below
/// `n_labels`; only their relative order matters.
pub(crate) fn embed_matrix(
    mat: &Mat<C64>,
    sub_support: &[usize],
    support: &[usize],
    n_labels: usize,
) -> Mat<C64> {
    debug_assert!(sub_support.iter().all(|q| support.contains(q)));
    // Relabel: position of each qubit inside `support` plays the role of
    // the qubit index in a compacted register of support.len() qubits.
    let compact: Vec<usize> = sub_support
        .iter()
        .map(|q| support.iter().position(|s| s == q).unwrap())
        .collect();
    let _ = n_labels;
    let m = support.len();
    let indexer = SupportIndexer::new(&compact, m);
    let subs = indexer.sub_table();
    let envs = indexer.env_table();
    let dim = 1usize << m;
    let mut out = Mat::<C64>::zeros(dim, dim);
    for &e in &envs {
        for (i, &oi) in subs.iter().enumerate() {
            for (j, &oj) in subs.iter().enumerate() {
                out[(e | oi, e | oj)] = mat[(i, j)];
            }
        }
    }
    out
}

/// Embed an operator into the full `n`-qubit register: acts as `op` on
/// its support and as the identity elsewhere.
pub fn kron_embed(op: &DenseOperator, n: usize) -> Result<DenseOperator> {
    if let Some(&q) = op.support().iter().find(|&&q| q >= n) {
        return Err(Error::domain(format!(
            "support qubit {q} out of range for {n}-qubit embedding"
        )));
    }
    let full: Vec<usize> = (0..n).collect();
    let matrix = embed_matrix(&op.matrix, &op.support, &full, n);
    Ok(DenseOperator { support: full, matrix })
}

/// Replace the action of `op` on the `outside` qubits by the normalized
/// identity: `(1/2^|S|) Tr_S(op) ⊗ 1_S`, keeping the total dimension.
///
/// This equals the Haar average of `U op U†` over unitaries on `S`, and
/// is a projection (applying it twice changes nothing). `outside` may be
/// empty (no-op) but must not cover the whole support.
pub fn haar_truncate(op: &DenseOperator, outside: &[usize]) -> Result<DenseOperator> {
    let mut outside: Vec<usize> = outside.to_vec();
    outside.sort_unstable();
    outside.dedup();
    if let Some(&q) = outside.iter().find(|q| !op.support().contains(q)) {
        return Err(Error::domain(format!("truncation qubit {q} not in operator support")));
    }
    if outside.len() == op.support().len() {
        return Err(Error::domain(
            "haar_truncate over the full system is not defined (keep set empty)",
        ));
    }
    if outside.is_empty() {
        return Ok(op.clone());
    }
    let n = op.support().len();
    // Work in the compacted register of op's own support.
    let positions: Vec<usize> = outside
        .iter()
        .map(|q| op.support().iter().position(|s| s == q).unwrap())
        .collect();
    let keep: Vec<usize> = (0..n).filter(|p| !positions.contains(p)).collect();
    let reduced = partial_trace_matrix(&op.matrix, n, &keep);
    let norm = C64::new(1.0 / (1usize << positions.len()) as f64, 0.0);
    let keep_labels: Vec<usize> = keep.clone();
    let all: Vec<usize> = (0..n).collect();
    let back = embed_matrix(&reduced, &keep_labels, &all, n);
    Ok(DenseOperator { support: op.support().to_vec(), matrix: back * faer::Scale(norm) })
}
