//! Second-quantised operators as sums of ladder-operator products.

use std::ops::{Add, Mul};
use std::sync::Arc;

use super::basis::{orbital, Basis, FockState, Spin};
use super::operator::MatrixOperator;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Elementary factor of a fermionic product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ladder {
    /// c†_p
    Create(usize),
    /// c_p
    Annihilate(usize),
    /// n_p
    Number(usize),
    /// 1 - n_p
    Hole(usize),
}

impl Ladder {
    pub fn orbital(self) -> usize {
        match self {
            Ladder::Create(p) | Ladder::Annihilate(p) | Ladder::Number(p) | Ladder::Hole(p) => p,
        }
    }

    pub fn adjoint(self) -> Ladder {
        match self {
            Ladder::Create(p) => Ladder::Annihilate(p),
            Ladder::Annihilate(p) => Ladder::Create(p),
            other => other,
        }
    }

    /// Act on a basis ket; `None` when the result vanishes.
    #[inline]
    fn act(self, bits: u64) -> Option<(f64, u64)> {
        let parity = |p: usize| {
            if (bits & ((1u64 << p) - 1)).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        match self {
            Ladder::Create(p) => (bits >> p & 1 == 0).then(|| (parity(p), bits | 1 << p)),
            Ladder::Annihilate(p) => (bits >> p & 1 == 1).then(|| (parity(p), bits & !(1 << p))),
            Ladder::Number(p) => (bits >> p & 1 == 1).then_some((1.0, bits)),
            Ladder::Hole(p) => (bits >> p & 1 == 0).then_some((1.0, bits)),
        }
    }
}

/// `coeff * ops[0] ops[1] ... ops[n-1]` (rightmost factor acts first).
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub coeff: f64,
    pub ops: Vec<Ladder>,
}

impl FermionTerm {
    pub fn new(coeff: f64, ops: Vec<Ladder>) -> Self {
        FermionTerm { coeff, ops }
    }

    pub fn apply(&self, bits: u64) -> Option<(f64, u64)> {
        let mut sign = 1.0;
        let mut b = bits;
        for op in self.ops.iter().rev() {
            let (s, nb) = op.act(b)?;
            sign *= s;
            b = nb;
        }
        Some((self.coeff * sign, b))
    }
}

/// Sum of fermionic terms on a fixed number of orbitals.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FermionOperator {
    pub n_orbitals: usize,
    pub terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn zero(n_orbitals: usize) -> Self {
        FermionOperator { n_orbitals, terms: Vec::new() }
    }

    pub fn identity(n_orbitals: usize) -> Self {
        Self::term(n_orbitals, 1.0, vec![])
    }

    pub fn term(n_orbitals: usize, coeff: f64, ops: Vec<Ladder>) -> Self {
        FermionOperator { n_orbitals, terms: vec![FermionTerm::new(coeff, ops)] }
    }

    /// n_p
    pub fn number(n_orbitals: usize, p: usize) -> Self {
        Self::term(n_orbitals, 1.0, vec![Ladder::Number(p)])
    }

    /// γ_{ijσ} = c†_{iσ} c_{jσ}
    pub fn hop(n_sites: usize, i: usize, j: usize, spin: Spin) -> Self {
        Self::term(2 * n_sites, 1.0, vec![Ladder::Create(orbital(i, spin)), Ladder::Annihilate(orbital(j, spin))])
    }

    pub fn push(&mut self, coeff: f64, ops: Vec<Ladder>) {
        if coeff != 0.0 {
            self.terms.push(FermionTerm::new(coeff, ops));
        }
    }

    pub fn scale(mut self, c: f64) -> Self {
        for t in &mut self.terms {
            t.coeff *= c;
        }
        self
    }

    pub fn adjoint(&self) -> Self {
        FermionOperator {
            n_orbitals: self.n_orbitals,
            terms: self
                .terms
                .iter()
                .map(|t| FermionTerm::new(t.coeff, t.ops.iter().rev().map(|o| o.adjoint()).collect()))
                .collect(),
        }
    }

    pub fn check_orbitals(&self) -> Result<()> {
        for t in &self.terms {
            for op in &t.ops {
                if op.orbital() >= self.n_orbitals {
                    return Err(Error::OrbitalOutOfRange { orbital: op.orbital(), n_orbitals: self.n_orbitals });
                }
            }
        }
        Ok(())
    }

    /// Matrix elements `<b_r| O |b_c>` in `basis`; terms leaving the basis are dropped.
    pub fn matrix(&self, basis: &Arc<Basis>, exec: Exec) -> Result<MatrixOperator> {
        if self.n_orbitals != basis.n_orbitals() {
            return Err(Error::DimensionMismatch { expected: basis.n_orbitals(), got: self.n_orbitals });
        }
        self.check_orbitals()?;
        let columns = exec.map_range(basis.dim(), |c| {
            let bits = basis.state(c).bits();
            let mut col = Vec::new();
            for t in &self.terms {
                if let Some((v, nb)) = t.apply(bits) {
                    if let Some(r) = basis.index_of(FockState(nb)) {
                        col.push((r, c, v));
                    }
                }
            }
            col
        });
        let triplets = columns.into_iter().flatten().collect();
        Ok(MatrixOperator::from_triplets(basis.clone(), triplets))
    }
}

impl Add for FermionOperator {
    type Output = FermionOperator;
    fn add(mut self, rhs: FermionOperator) -> FermionOperator {
        assert_eq!(self.n_orbitals, rhs.n_orbitals);
        self.terms.extend(rhs.terms);
        self
    }
}

impl Mul for &FermionOperator {
    type Output = FermionOperator;
    fn mul(self, rhs: &FermionOperator) -> FermionOperator {
        assert_eq!(self.n_orbitals, rhs.n_orbitals);
        let mut out = FermionOperator::zero(self.n_orbitals);
        for a in &self.terms {
            for b in &rhs.terms {
                let mut ops = a.ops.clone();
                ops.extend_from_slice(&b.ops);
                out.push(a.coeff * b.coeff, ops);
            }
        }
        out
    }
}
