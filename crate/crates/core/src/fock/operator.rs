use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::basis::Basis;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::CsrMatrix;

/// Dimension above which operators are stored sparse.
pub const DENSE_MAX_DIM: usize = 4096;

/// Tolerance for the hermitian flag.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Storage {
    Dense(DMatrix<f64>),
    Sparse(CsrMatrix),
}

/// Real operator matrix in a Fock basis.
///
/// Every operator in this crate (Hubbard terms, generators, projectors, S²)
/// has real matrix elements in the occupation basis, so storage is real; the
/// hermitian flag therefore means "symmetric".
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixOperator {
    basis: Arc<Basis>,
    storage: Storage,
    hermitian: bool,
}

impl MatrixOperator {
    pub fn dense(basis: Arc<Basis>, m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != basis.dim() || m.ncols() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: m.nrows().max(m.ncols()) });
        }
        let hermitian = asymmetry(&m) <= HERMITIAN_TOL;
        Ok(MatrixOperator { basis, storage: Storage::Dense(m), hermitian })
    }

    /// Storage picked by dimension: dense up to [`DENSE_MAX_DIM`], CSR above.
    pub fn from_triplets(basis: Arc<Basis>, triplets: Vec<(usize, usize, f64)>) -> Self {
        let n = basis.dim();
        let csr = CsrMatrix::from_triplets(n, n, triplets);
        let hermitian = csr.asymmetry() <= HERMITIAN_TOL;
        let storage = if n <= DENSE_MAX_DIM { Storage::Dense(csr.to_dense()) } else { Storage::Sparse(csr) };
        MatrixOperator { basis, storage, hermitian }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(s) => s.to_dense(),
        }
    }

    pub fn dense_ref(&self) -> Option<&DMatrix<f64>> {
        match &self.storage {
            Storage::Dense(m) => Some(m),
            Storage::Sparse(_) => None,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m[(r, c)],
            Storage::Sparse(s) => s.get(r, c),
        }
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        self.matvec_with(x, Exec::Sequential)
    }

    pub fn matvec_with(&self, x: &DVector<f64>, exec: Exec) -> DVector<f64> {
        match &self.storage {
            Storage::Dense(m) => m * x,
            Storage::Sparse(s) => s.matvec(x, exec),
        }
    }

    /// `<x|O|x>`
    pub fn expectation(&self, x: &DVector<f64>) -> f64 {
        x.dot(&self.matvec(x))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => asymmetry(m),
            Storage::Sparse(s) => s.asymmetry(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.norm(),
            Storage::Sparse(s) => s.frobenius_norm(),
        }
    }

    /// Same basis, new dense matrix.
    pub fn with_dense(&self, m: DMatrix<f64>) -> MatrixOperator {
        MatrixOperator::dense(self.basis.clone(), m).expect("shape preserved")
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let m = self.to_dense();
        (0..m.nrows()).all(|r| (0..m.ncols()).all(|c| r == c || m[(r, c)].abs() <= tol))
    }
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut dev: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in r + 1..m.ncols() {
            dev = dev.max((m[(r, c)] - m[(c, r)]).abs());
        }
    }
    dev
}
