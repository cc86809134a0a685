//! Schrieffer-Wolff generator: coefficient table and operator.
//!
//! For an ordered pair `(i, j)` the hop `γ_ijσ = c†_iσ c_jσ` is split into four
//! channels by the occupation of the opposite spin `σ̄`:
//!
//! | x | projector `p_{ijσ̄,x}`     | energy denominator |
//! |---|---------------------------|--------------------|
//! | 0 | `(1-n_iσ̄)(1-n_jσ̄)`        | `Δμ`               |
//! | 1 | `n_iσ̄ (1-n_jσ̄)`           | `Δμ + U_i`         |
//! | 2 | `(1-n_iσ̄) n_jσ̄`           | `Δμ - U_j`         |
//! | 3 | `n_iσ̄ n_jσ̄`               | `Δμ + U_i - U_j`   |
//!
//! with `Δμ = μ_i - μ_j` and `λ_x = -t_ij / d_x` (zero when `d_x = 0`).
//! The generator is
//! `S = ½ Σ_{i≠j,σ,x} λ_{ij,x} p_{ijσ̄,x} (γ_ijσ - γ_jiσ)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{orbital, Basis, FermionOperator, HubbardParams, Ladder, MatrixOperator, Spin};
use crate::linalg::commutator;

/// Coefficients of one stored pair `i < j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairLambdas {
    pub i: usize,
    pub j: usize,
    /// Hopping amplitude `t_ij`.
    pub t: f64,
    pub lambda: [f64; 4],
}

impl PairLambdas {
    /// Coefficients of the reversed pair `(j, i)`.
    pub fn reversed(&self) -> [f64; 4] {
        let l = self.lambda;
        [-l[0], -l[2], -l[1], -l[3]]
    }

    /// `λ₁ / λ₂`, undefined when `λ₂ = 0`.
    pub fn beta(&self) -> Option<f64> {
        (self.lambda[2] != 0.0).then(|| self.lambda[1] / self.lambda[2])
    }

    /// `√((λ₁² + λ₂²) / 2)`, positive root.
    pub fn alpha(&self) -> f64 {
        ((self.lambda[1].powi(2) + self.lambda[2].powi(2)) / 2.0).sqrt()
    }

    /// `W₁ = λ₂ t₁ + λ₁ t₂` with zeroth-order integrals `t_x = -t`.
    pub fn w1(&self) -> f64 {
        -self.t * (self.lambda[1] + self.lambda[2])
    }

    /// `W₂ = λ₁ t₁ - λ₂ t₂`.
    pub fn w2(&self) -> f64 {
        -self.t * (self.lambda[1] - self.lambda[2])
    }
}

/// Generator coefficients per bond. Spin-independent, since the model is.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaTable {
    pub n_sites: usize,
    pairs: BTreeMap<(usize, usize), PairLambdas>,
}

impl LambdaTable {
    pub fn new(n_sites: usize) -> Self {
        LambdaTable { n_sites, pairs: BTreeMap::new() }
    }

    /// Insert coefficients for a pair; `(j, i)` input is stored as its `i < j` partner.
    pub fn insert(&mut self, i: usize, j: usize, t: f64, lambda: [f64; 4]) {
        assert!(i != j && i < self.n_sites && j < self.n_sites);
        let p = PairLambdas { i, j, t, lambda };
        let stored = if i < j { p } else { PairLambdas { i: j, j: i, t, lambda: p.reversed() } };
        self.pairs.insert((stored.i, stored.j), stored);
    }

    pub fn pairs(&self) -> impl Iterator<Item = &PairLambdas> {
        self.pairs.values()
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<&PairLambdas> {
        self.pairs.get(&(i.min(j), i.max(j)))
    }

    /// `λ_{ij,x}` for an ordered pair, including the implied `i > j` partners.
    pub fn lambda(&self, i: usize, j: usize, x: usize) -> f64 {
        match self.pair(i, j) {
            None => 0.0,
            Some(p) if i < j => p.lambda[x],
            Some(p) => p.reversed()[x],
        }
    }

    /// Coefficients of ordered pairs `(i, j)` and `(j, i)` for every stored bond.
    pub fn ordered(&self) -> Vec<(usize, usize, f64, [f64; 4])> {
        let mut out = Vec::with_capacity(2 * self.pairs.len());
        for p in self.pairs.values() {
            out.push((p.i, p.j, p.t, p.lambda));
            out.push((p.j, p.i, p.t, p.reversed()));
        }
        out
    }
}

/// Denominators `d_x` of the ordered pair `(i, j)`.
pub fn denominators(params: &HubbardParams, i: usize, j: usize) -> [f64; 4] {
    let dmu = params.mu[i] - params.mu[j];
    [dmu, dmu + params.u[i], dmu - params.u[j], dmu + params.u[i] - params.u[j]]
}

/// Standard SW coefficients `λ_x = -t / d_x`, exactly zero on resonant channels.
pub fn sw_lambdas(params: &HubbardParams) -> Result<LambdaTable> {
    params.validate()?;
    let mut table = LambdaTable::new(params.n_sites);
    for (i, j) in params.bonds() {
        let t = params.t[(i, j)];
        let d = denominators(params, i, j);
        let lambda = d.map(|dx| if dx == 0.0 { 0.0 } else { -t / dx });
        table.insert(i, j, t, lambda);
    }
    Ok(table)
}

/// Opposite-spin projector of channel `x` for the ordered pair `(i, j)`.
pub fn channel_projector(i: usize, j: usize, spin: Spin, x: usize) -> Vec<Ladder> {
    let (a, b) = (orbital(i, spin.flip()), orbital(j, spin.flip()));
    match x {
        0 => vec![Ladder::Hole(a), Ladder::Hole(b)],
        1 => vec![Ladder::Number(a), Ladder::Hole(b)],
        2 => vec![Ladder::Hole(a), Ladder::Number(b)],
        3 => vec![Ladder::Number(a), Ladder::Number(b)],
        _ => panic!("channel index {x} out of range"),
    }
}

/// `γ_ijσ` preceded by the projector factors `proj`.
pub(crate) fn projected_hop(proj: &[Ladder], i: usize, j: usize, spin: Spin) -> Vec<Ladder> {
    let mut ops = proj.to_vec();
    ops.push(Ladder::Create(orbital(i, spin)));
    ops.push(Ladder::Annihilate(orbital(j, spin)));
    ops
}

/// Generator as a fermion operator.
pub fn generator_operator(table: &LambdaTable) -> FermionOperator {
    let mut op = FermionOperator::zero(2 * table.n_sites);
    for (i, j, _, lambda) in table.ordered() {
        for spin in Spin::BOTH {
            for (x, &l) in lambda.iter().enumerate() {
                if l == 0.0 {
                    continue;
                }
                let proj = channel_projector(i, j, spin, x);
                op.push(0.5 * l, projected_hop(&proj, i, j, spin));
                op.push(-0.5 * l, projected_hop(&proj, j, i, spin));
            }
        }
    }
    op
}

pub fn build_generator(table: &LambdaTable, basis: &Arc<Basis>) -> Result<MatrixOperator> {
    build_generator_with(table, basis, Exec::Sequential)
}

pub fn build_generator_with(table: &LambdaTable, basis: &Arc<Basis>, exec: Exec) -> Result<MatrixOperator> {
    if table.n_sites != basis.n_sites() {
        return Err(Error::DimensionMismatch { expected: basis.n_sites(), got: table.n_sites });
    }
    generator_operator(table).matrix(basis, exec)
}

/// `‖[S, H0] + V‖_F`
pub fn first_order_residual(s: &MatrixOperator, h0: &MatrixOperator, v: &MatrixOperator) -> Result<f64> {
    if s.dim() != h0.dim() || s.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: h0.dim().max(v.dim()) });
    }
    let r = commutator(&s.to_dense(), &h0.to_dense()) + v.to_dense();
    Ok(r.norm())
}
