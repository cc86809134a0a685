use std::sync::Arc;

use nalgebra::DMatrix;

use super::basis::{orbital, Basis, Spin};
use super::operator::MatrixOperator;
use super::ops::{FermionOperator, Ladder};
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Hubbard model parameters in energy units.
#[derive(Clone, Debug, PartialEq)]
pub struct HubbardParams {
    pub n_sites: usize,
    /// Symmetric hopping table, zero diagonal.
    pub t: DMatrix<f64>,
    pub mu: Vec<f64>,
    pub u: Vec<f64>,
    pub periodic: bool,
}

impl HubbardParams {
    pub fn dimer(t: f64, mu: [f64; 2], u: [f64; 2]) -> Self {
        HubbardParams {
            n_sites: 2,
            t: DMatrix::from_row_slice(2, 2, &[0.0, t, t, 0.0]),
            mu: mu.to_vec(),
            u: u.to_vec(),
            periodic: false,
        }
    }

    pub fn homogeneous_dimer(t: f64, u: f64) -> Self {
        Self::dimer(t, [0.0, 0.0], [u, u])
    }

    /// Homogeneous ring with nearest-neighbour hopping `t` and periodic closure.
    /// Two sites share a single bond.
    pub fn ring(n_sites: usize, t: f64, u: f64) -> Self {
        let mut tm = DMatrix::zeros(n_sites, n_sites);
        for i in 0..n_sites {
            let j = (i + 1) % n_sites;
            if i != j {
                tm[(i, j)] = t;
                tm[(j, i)] = t;
            }
        }
        HubbardParams { n_sites, t: tm, mu: vec![0.0; n_sites], u: vec![u; n_sites], periodic: true }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_sites;
        if n == 0 {
            return Err(Error::InvalidParams("no sites".into()));
        }
        if self.t.nrows() != n || self.t.ncols() != n || self.mu.len() != n || self.u.len() != n {
            return Err(Error::InvalidParams(format!("parameter arrays must all have length {n}")));
        }
        for i in 0..n {
            if self.t[(i, i)] != 0.0 {
                return Err(Error::InvalidParams(format!("t[{i},{i}] must vanish")));
            }
            for j in 0..n {
                if self.t[(i, j)] != self.t[(j, i)] {
                    return Err(Error::InvalidParams(format!("t is not symmetric at ({i},{j})")));
                }
            }
        }
        let finite = self.t.iter().chain(&self.mu).chain(&self.u).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        Ok(())
    }

    /// Pairs `i < j` with non-zero hopping.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n_sites {
            for j in i + 1..self.n_sites {
                if self.t[(i, j)] != 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// `sum mu_i n_i + sum U_i n_i↑ n_i↓`
    pub fn local_operator(&self) -> FermionOperator {
        let mut op = FermionOperator::zero(2 * self.n_sites);
        for i in 0..self.n_sites {
            for s in Spin::BOTH {
                op.push(self.mu[i], vec![Ladder::Number(orbital(i, s))]);
            }
            op.push(self.u[i], vec![Ladder::Number(orbital(i, Spin::Up)), Ladder::Number(orbital(i, Spin::Down))]);
        }
        op
    }

    /// `-1/2 sum_{i≠j,σ} t_ij (γ_ijσ + γ_jiσ)`, i.e. `-sum_{i<j,σ} t_ij (γ_ijσ + h.c.)`.
    pub fn kinetic_operator(&self) -> FermionOperator {
        let mut op = FermionOperator::zero(2 * self.n_sites);
        for (i, j) in self.bonds() {
            let t = self.t[(i, j)];
            for s in Spin::BOTH {
                let (a, b) = (orbital(i, s), orbital(j, s));
                op.push(-t, vec![Ladder::Create(a), Ladder::Annihilate(b)]);
                op.push(-t, vec![Ladder::Create(b), Ladder::Annihilate(a)]);
            }
        }
        op
    }
}

/// Local part `H0` (diagonal) and kinetic part `V` in `basis`.
pub fn build_hubbard(params: &HubbardParams, basis: &Arc<Basis>) -> Result<(MatrixOperator, MatrixOperator)> {
    build_hubbard_with(params, basis, Exec::Sequential)
}

pub fn build_hubbard_with(
    params: &HubbardParams,
    basis: &Arc<Basis>,
    exec: Exec,
) -> Result<(MatrixOperator, MatrixOperator)> {
    params.validate()?;
    if params.n_sites != basis.n_sites() {
        return Err(Error::DimensionMismatch { expected: basis.n_sites(), got: params.n_sites });
    }
    let h0 = params.local_operator().matrix(basis, exec)?;
    let v = params.kinetic_operator().matrix(basis, exec)?;
    Ok((h0, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;

    #[test]
    fn homogeneous_dimer_matrices() {
        let basis = Arc::new(build_basis(2, 1, 1).unwrap());
        let (h0, v) = build_hubbard(&HubbardParams::homogeneous_dimer(1.0, 4.0), &basis).unwrap();
        // states |1100⟩, |0110⟩, |1001⟩, |0011⟩
        let d: Vec<f64> = (0..4).map(|i| h0.get(i, i)).collect();
        assert_eq!(d, vec![4.0, 0.0, 0.0, 4.0]);
        assert!(h0.is_diagonal(0.0));
        let expect =
            DMatrix::from_row_slice(4, 4, &[0., 1., -1., 0., 1., 0., 0., 1., -1., 0., 0., -1., 0., 1., -1., 0.]);
        assert_eq!(v.to_dense(), expect);
    }

    #[test]
    fn tilted_dimer_diagonal() {
        let basis = Arc::new(build_basis(2, 1, 1).unwrap());
        let (h0, _) = build_hubbard(&HubbardParams::dimer(1.0, [1.0, -1.0], [4.0, 4.0]), &basis).unwrap();
        let d: Vec<f64> = (0..4).map(|i| h0.get(i, i)).collect();
        assert_eq!(d, vec![6.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn ring_bonds() {
        assert_eq!(HubbardParams::ring(2, 1.0, 4.0).bonds(), vec![(0, 1)]);
        assert_eq!(HubbardParams::ring(4, 1.0, 4.0).bonds(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert!(HubbardParams::ring(6, 1.0, 4.0).validate().is_ok());
    }
}
