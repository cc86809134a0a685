//! Fock-space bases, second-quantised operators, Hubbard Hamiltonians and
//! the exact-diagonalisation reference.

mod basis;
mod hubbard;
mod operator;
mod ops;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use basis::{build_basis, orbital, Basis, FockState, Sector, Spin, MAX_SITES};
pub use hubbard::{build_hubbard, build_hubbard_with, HubbardParams};
pub use operator::{MatrixOperator, Storage, DENSE_MAX_DIM, HERMITIAN_TOL};
pub use ops::{FermionOperator, FermionTerm, Ladder};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{lanczos_lowest, sym_eigen_sorted, LanczosOptions};

/// Projector onto configurations without doubly occupied sites.
pub fn heisenberg_projector(basis: &Arc<Basis>) -> Result<MatrixOperator> {
    if !basis.is_half_filled() {
        return Err(Error::InvalidParams("the Heisenberg projector needs a half-filled sector".into()));
    }
    let n = basis.n_sites();
    let triplets =
        (0..basis.dim()).filter(|&i| basis.state(i).double_occupancies(n) == 0).map(|i| (i, i, 1.0)).collect();
    Ok(MatrixOperator::from_triplets(basis.clone(), triplets))
}

/// `(POP + QOQ, POQ + QOP)` with `Q = 1 - P`.
pub fn block_split(o: &MatrixOperator, p: &MatrixOperator) -> Result<(MatrixOperator, MatrixOperator)> {
    if o.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: o.dim() });
    }
    let (om, pm) = (o.to_dense(), p.to_dense());
    let q = DMatrix::identity(pm.nrows(), pm.ncols()) - &pm;
    let d = &pm * &om * &pm + &q * &om * &q;
    let x = &om - &d;
    Ok((o.with_dense(d), o.with_dense(x)))
}

/// k lowest eigenpairs, ascending. Dense up to [`DENSE_MAX_DIM`], Lanczos above.
pub fn exact_eigensolve(o: &MatrixOperator, k: usize) -> Result<Vec<(f64, DVector<f64>)>> {
    exact_eigensolve_with(o, k, Exec::Sequential)
}

pub fn exact_eigensolve_with(o: &MatrixOperator, k: usize, exec: Exec) -> Result<Vec<(f64, DVector<f64>)>> {
    let dev = o.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let k = k.min(o.dim());
    if k == 0 {
        return Ok(Vec::new());
    }
    if o.dim() <= DENSE_MAX_DIM {
        let mut pairs = sym_eigen_sorted(&o.to_dense());
        pairs.truncate(k);
        Ok(pairs)
    } else {
        lanczos_lowest(|x| o.matvec_with(x, exec), o.dim(), k, LanczosOptions::default())
    }
}

/// Total spin squared `S² = S₋S₊ + S_z² + S_z` as a fermion operator.
pub fn spin_squared_operator(n_sites: usize) -> FermionOperator {
    let n_orb = 2 * n_sites;
    let mut s_plus = FermionOperator::zero(n_orb);
    let mut s_z = FermionOperator::zero(n_orb);
    for i in 0..n_sites {
        let (up, dn) = (orbital(i, Spin::Up), orbital(i, Spin::Down));
        s_plus.push(1.0, vec![Ladder::Create(up), Ladder::Annihilate(dn)]);
        s_z.push(0.5, vec![Ladder::Number(up)]);
        s_z.push(-0.5, vec![Ladder::Number(dn)]);
    }
    let s_minus = s_plus.adjoint();
    (&s_minus * &s_plus) + (&s_z * &s_z) + s_z
}

pub fn spin_squared(basis: &Arc<Basis>) -> Result<MatrixOperator> {
    spin_squared_operator(basis.n_sites()).matrix(basis, Exec::Sequential)
}
