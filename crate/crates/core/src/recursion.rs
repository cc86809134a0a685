//! Interaction integrals of the transformed Hamiltonian.
//!
//! The `k`-fold nested commutator `𝒮ᵏ(V) = [S, [S, ... V]]` of a two-site
//! bond is spanned by four channel operators per ordered pair `(i, j)` and
//! spin `σ`:
//!
//! ```text
//! ½ Σ_x T_x p_x (γ_ijσ + γ_jiσ)            hopping   (even k)
//! ½ Σ_x K_x p_x (n_iσ - n_jσ)              diagonal  (odd k)
//! ½ J (γ_ijσ γ_jiσ̄ + γ_jiσ γ_ijσ̄)          exchange  (odd k)
//! ½ L (γ_ijσ γ_ijσ̄ + γ_jiσ γ_jiσ̄)          pair hop  (odd k)
//! ```
//!
//! The integrals obey `T⁽⁰⁾ = -t`, `K⁽ᵏ⁺¹⁾ = 2λT⁽ᵏ⁾`, `J = λ₂T₂ - λ₁T₁`,
//! `L = λ₁T₂ - λ₂T₁`, and the even orders follow from the odd ones through
//! [`next_even`]. Channels 1 and 2 decouple into two geometric sequences with
//! ratios `-(2α)²` and `-(4α)²`, which is what makes closed forms possible.
//!
//! Summing with the weights of `e^{θS} H e^{-θS}` (valid when `[S, H0] = -V`),
//! `H̄(θ) = H0 + Σ_m θᵐ (m+1-θ)/(m+1)! 𝒮ᵐ(V)`, gives [`integrals_closed`].
//!
//! Table superscripts are commutator depths: a table of order `k` describes
//! `𝒮ᵏ(V)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{block_split, heisenberg_projector, orbital, Basis, FermionOperator, Ladder, MatrixOperator, Spin};
use crate::linalg::{commutator, expm};
use crate::swgen::{build_generator, channel_projector, projected_hop, LambdaTable};

/// Which quantity an [`IntegralTable`] holds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    /// Coefficients of `𝒮ᵏ(V)`.
    Finite(usize),
    /// Weighted series through the given depth.
    PartialSum(usize),
    /// Infinite-order closed form.
    Summed,
}

/// Integrals of one ordered pair. Identical for both spins.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PairIntegrals {
    pub t: [f64; 4],
    pub k: [f64; 4],
    pub j: f64,
    pub l: f64,
}

impl PairIntegrals {
    fn axpy(&mut self, a: f64, x: &PairIntegrals) {
        for c in 0..4 {
            self.t[c] += a * x.t[c];
            self.k[c] += a * x.k[c];
        }
        self.j += a * x.j;
        self.l += a * x.l;
    }

    pub fn max_abs_diff(&self, other: &PairIntegrals) -> f64 {
        let mut d: f64 = (self.j - other.j).abs().max((self.l - other.l).abs());
        for c in 0..4 {
            d = d.max((self.t[c] - other.t[c]).abs()).max((self.k[c] - other.k[c]).abs());
        }
        d
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralTable {
    pub order: Order,
    pub theta: f64,
    pub n_sites: usize,
    /// Keyed by ordered pair `(i, j)`, both orientations present.
    pub entries: BTreeMap<(usize, usize), PairIntegrals>,
}

impl IntegralTable {
    pub fn get(&self, i: usize, j: usize) -> Option<&PairIntegrals> {
        self.entries.get(&(i, j))
    }

    pub fn max_abs_diff(&self, other: &IntegralTable) -> f64 {
        self.entries
            .iter()
            .map(|(key, a)| other.entries.get(key).map_or(f64::INFINITY, |b| a.max_abs_diff(b)))
            .fold(0.0, f64::max)
    }
}

/// Odd order from the preceding even order.
pub fn next_odd(even: &PairIntegrals, lambda: &[f64; 4]) -> PairIntegrals {
    let t = even.t;
    PairIntegrals {
        t: [0.0; 4],
        k: [0, 1, 2, 3].map(|x| 2.0 * lambda[x] * t[x]),
        j: lambda[2] * t[2] - lambda[1] * t[1],
        l: lambda[1] * t[2] - lambda[2] * t[1],
    }
}

/// Even order from the preceding odd order.
pub fn next_even(odd: &PairIntegrals, lambda: &[f64; 4]) -> PairIntegrals {
    let [l0, l1, l2, l3] = *lambda;
    let [k0, k1, k2, k3] = odd.k;
    let (j, l) = (odd.j, odd.l);
    PairIntegrals {
        t: [
            -2.0 * l0 * k0,
            -l1 * (3.0 * k1 - k2 - 2.0 * j) + 2.0 * l2 * l,
            -l2 * (3.0 * k2 - k1 + 2.0 * j) - 2.0 * l1 * l,
            -2.0 * l3 * k3,
        ],
        k: [0.0; 4],
        j: 0.0,
        l: 0.0,
    }
}

/// Hopping integrals `T⁽²ⁿ⁾` from the decoupled geometric sequences.
fn even_hopping(t_ij: f64, lambda: &[f64; 4], n: usize) -> [f64; 4] {
    let t0 = -t_ij;
    if n == 0 {
        return [t0; 4];
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let geo = |a: f64| a.powi(2 * n as i32);
    let [l0, l1, l2, l3] = *lambda;
    let a2 = (l1 * l1 + l2 * l2) / 2.0;
    let (t1, t2) = if a2 == 0.0 {
        (0.0, 0.0)
    } else {
        let alpha = a2.sqrt();
        let w1 = t0 * (l1 + l2);
        let w2 = t0 * (l1 - l2);
        let (g2, g4) = (geo(2.0 * alpha), geo(4.0 * alpha));
        (sign * (l2 * w1 * g2 + l1 * w2 * g4) / (2.0 * a2), sign * (l1 * w1 * g2 - l2 * w2 * g4) / (2.0 * a2))
    };
    [sign * t0 * geo(2.0 * l0), t1, t2, sign * t0 * geo(2.0 * l3)]
}

/// Integrals of `𝒮ᵏ(V)` for every ordered pair.
pub fn integrals_order(table: &LambdaTable, k: usize) -> IntegralTable {
    let mut entries = BTreeMap::new();
    for (i, j, t, lambda) in table.ordered() {
        let even = PairIntegrals { t: even_hopping(t, &lambda, k / 2), ..Default::default() };
        let e = if k % 2 == 0 { even } else { next_odd(&even, &lambda) };
        entries.insert((i, j), e);
    }
    IntegralTable { order: Order::Finite(k), theta: 1.0, n_sites: table.n_sites, entries }
}

/// Same as [`integrals_order`] but by stepping the recursion `k` times.
pub fn integrals_order_stepwise(table: &LambdaTable, k: usize) -> IntegralTable {
    let mut entries = BTreeMap::new();
    for (i, j, t, lambda) in table.ordered() {
        let mut e = PairIntegrals { t: [-t; 4], ..Default::default() };
        for step in 1..=k {
            e = if step % 2 == 1 { next_odd(&e, &lambda) } else { next_even(&e, &lambda) };
        }
        entries.insert((i, j), e);
    }
    IntegralTable { order: Order::Finite(k), theta: 1.0, n_sites: table.n_sites, entries }
}

/// Weight of `𝒮ᵐ(V)` in `e^{θS} H e^{-θS} - H0`.
pub fn series_weight(m: usize, theta: f64) -> f64 {
    let fact: f64 = (1..=m + 1).map(|v| v as f64).product();
    theta.powi(m as i32) * (m as f64 + 1.0 - theta) / fact
}

/// Weighted partial sum of the integral tables through depth `order_max`.
pub fn integrals_series(table: &LambdaTable, theta: f64, order_max: usize) -> IntegralTable {
    let mut acc =
        IntegralTable { order: Order::PartialSum(order_max), theta, n_sites: table.n_sites, entries: BTreeMap::new() };
    for (i, j, _, _) in table.ordered() {
        acc.entries.insert((i, j), PairIntegrals::default());
    }
    for m in 0..=order_max {
        let w = series_weight(m, theta);
        let term = integrals_order(table, m);
        for (key, e) in acc.entries.iter_mut() {
            e.axpy(w, &term.entries[key]);
        }
    }
    acc
}

/// Unnormalised `sin(x)/x`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Even-order resummation `Σ (-1)ⁿ a²ⁿ θ²ⁿ (2n+1-θ)/(2n+1)!`.
fn c_fn(theta: f64, a: f64) -> f64 {
    (theta * a).cos() - theta * sinc(theta * a)
}

/// Odd-order resummation `Σ (-1)ⁿ a²ⁿ θ²ⁿ⁺¹ (2n+2-θ)/(2n+2)!`.
fn d_fn(theta: f64, a: f64) -> f64 {
    theta * sinc(theta * a) - 0.5 * theta * theta * sinc(0.5 * theta * a).powi(2)
}

/// Infinite-order integrals of `e^{θS} H e^{-θS} - H0` in closed form.
///
/// Finite as `λ₂ → 0` because only the combinations `W₁`, `W₂` appear.
pub fn integrals_closed(table: &LambdaTable, theta: f64) -> IntegralTable {
    let mut entries = BTreeMap::new();
    for (i, j, t, lambda) in table.ordered() {
        let t0 = -t;
        let [l0, l1, l2, l3] = lambda;
        let mut e = PairIntegrals {
            t: [t0 * c_fn(theta, 2.0 * l0), 0.0, 0.0, t0 * c_fn(theta, 2.0 * l3)],
            k: [2.0 * l0 * t0 * d_fn(theta, 2.0 * l0), 0.0, 0.0, 2.0 * l3 * t0 * d_fn(theta, 2.0 * l3)],
            j: 0.0,
            l: 0.0,
        };
        let a2 = (l1 * l1 + l2 * l2) / 2.0;
        if a2 == 0.0 {
            e.t[1] = t0 * (1.0 - theta);
            e.t[2] = t0 * (1.0 - theta);
        } else {
            let alpha = a2.sqrt();
            let w1 = t0 * (l1 + l2);
            let w2 = t0 * (l1 - l2);
            let (c2, c4) = (c_fn(theta, 2.0 * alpha), c_fn(theta, 4.0 * alpha));
            let (d2, d4) = (d_fn(theta, 2.0 * alpha), d_fn(theta, 4.0 * alpha));
            let n = 2.0 * a2;
            e.t[1] = (l2 * w1 * c2 + l1 * w2 * c4) / n;
            e.t[2] = (l1 * w1 * c2 - l2 * w2 * c4) / n;
            e.k[1] = 2.0 * l1 * (l2 * w1 * d2 + l1 * w2 * d4) / n;
            e.k[2] = 2.0 * l2 * (l1 * w1 * d2 - l2 * w2 * d4) / n;
            e.j = -w2 * d4;
            e.l = ((l1 * l1 - l2 * l2) * w1 * d2 - 2.0 * l1 * l2 * w2 * d4) / n;
        }
        entries.insert((i, j), e);
    }
    IntegralTable { order: Order::Summed, theta, n_sites: table.n_sites, entries }
}

/// Channel operators weighted by the table entries, summed over pairs and spins.
pub fn integrals_operator(table: &IntegralTable) -> FermionOperator {
    let mut op = FermionOperator::zero(2 * table.n_sites);
    for (&(i, j), e) in &table.entries {
        for s in Spin::BOTH {
            for x in 0..4 {
                let proj = channel_projector(i, j, s, x);
                op.push(0.5 * e.t[x], projected_hop(&proj, i, j, s));
                op.push(0.5 * e.t[x], projected_hop(&proj, j, i, s));
                let mut ni = proj.clone();
                ni.push(Ladder::Number(orbital(i, s)));
                op.push(0.5 * e.k[x], ni);
                let mut nj = proj;
                nj.push(Ladder::Number(orbital(j, s)));
                op.push(-0.5 * e.k[x], nj);
            }
            let sb = s.flip();
            let hop =
                |a: usize, b: usize, sp: Spin| [Ladder::Create(orbital(a, sp)), Ladder::Annihilate(orbital(b, sp))];
            op.push(0.5 * e.j, [hop(i, j, s), hop(j, i, sb)].concat());
            op.push(0.5 * e.j, [hop(j, i, s), hop(i, j, sb)].concat());
            op.push(0.5 * e.l, [hop(i, j, s), hop(i, j, sb)].concat());
            op.push(0.5 * e.l, [hop(j, i, s), hop(j, i, sb)].concat());
        }
    }
    op
}

/// Matrix of the channel operators described by `table`.
pub fn reconstruct(table: &IntegralTable, basis: &Arc<Basis>) -> Result<MatrixOperator> {
    if table.n_sites != basis.n_sites() {
        return Err(Error::DimensionMismatch { expected: basis.n_sites(), got: table.n_sites });
    }
    integrals_operator(table).matrix(basis, Exec::Sequential)
}

/// `H̄ = H0 + Σ channel operators` for a summed table.
pub fn assemble_hbar(h0: &MatrixOperator, table: &IntegralTable, basis: &Arc<Basis>) -> Result<MatrixOperator> {
    if matches!(table.order, Order::Finite(_)) {
        return Err(Error::InvalidParams("assemble_hbar needs a summed integral table".into()));
    }
    let r = reconstruct(table, basis)?;
    Ok(h0.with_dense(h0.to_dense() + r.to_dense()))
}

/// `𝒮ⁿ(V)` for `n = 0..=n_max` by explicit commutators.
pub fn nested_commutator_series(s: &MatrixOperator, v: &MatrixOperator, n_max: usize) -> Result<Vec<MatrixOperator>> {
    if n_max > 40 {
        return Err(Error::InvalidParams(format!("n_max must be at most 40, got {n_max}")));
    }
    if s.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: v.dim() });
    }
    let sm = s.to_dense();
    let mut cur = v.to_dense();
    let mut out = vec![v.with_dense(cur.clone())];
    for _ in 0..n_max {
        cur = commutator(&sm, &cur);
        out.push(v.with_dense(cur.clone()));
    }
    Ok(out)
}

/// `e^{θS} H e^{-θS}` by dense exponentials.
pub fn similarity_transform(h: &DMatrix<f64>, s: &DMatrix<f64>, theta: f64) -> DMatrix<f64> {
    let u = expm(&(s * theta));
    let ui = expm(&(s * -theta));
    &u * h * &ui
}

/// Frobenius norm of the off-block part `POQ + QOP`.
pub fn coupling_norm(hbar: &MatrixOperator, p: &MatrixOperator) -> Result<f64> {
    Ok(block_split(hbar, p)?.1.frobenius_norm())
}

/// Bernoulli numbers `B_0..=B_m` (with `B_1 = -1/2`) as exact rationals.
pub fn bernoulli(m: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(m + 1);
    for n in 0..=m {
        if n == 0 {
            b.push(BigRational::one());
            continue;
        }
        // Σ_{k=0}^{n} C(n+1, k) B_k = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            acc += bk * BigRational::from_integer(binom.clone());
            binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(n + 1)));
    }
    b
}

/// `c_n = 2²ⁿ B₂ₙ / (2n)!` for `n = 0..=n_max`.
pub fn vv_coefficients(n_max: usize) -> Vec<f64> {
    let b = bernoulli(2 * n_max);
    let mut fact = BigInt::one();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            fact *= BigInt::from((2 * n - 1) * (2 * n));
        }
        let c = &b[2 * n] * BigRational::from_integer(BigInt::from(4).pow(n as u32))
            / BigRational::from_integer(fact.clone());
        out.push(c.to_f64().expect("finite coefficient"));
    }
    out
}

/// Norm of the truncated block-diagonalisation condition
/// `[θS, H0] + [θS, V_D] + Σ_{n≤order_max} c_n 𝒢²ⁿ(V_X)`, `𝒢 = [θS, ·]`.
pub fn vv_residual(
    table: &LambdaTable,
    theta: f64,
    h0: &MatrixOperator,
    v: &MatrixOperator,
    order_max: usize,
) -> Result<f64> {
    if order_max > 20 {
        return Err(Error::InvalidParams(format!("order_max must be at most 20, got {order_max}")));
    }
    let basis = v.basis().clone();
    let p = heisenberg_projector(&basis)?;
    let (vd, vx) = block_split(v, &p)?;
    let g = build_generator(table, &basis)?.to_dense() * theta;
    let mut r = commutator(&g, &h0.to_dense()) + commutator(&g, &vd.to_dense());
    let coeffs = vv_coefficients(order_max);
    let mut term = vx.to_dense();
    for (n, c) in coeffs.iter().enumerate() {
        if n > 0 {
            term = commutator(&g, &commutator(&g, &term));
        }
        r += &term * *c;
    }
    Ok(r.norm())
}
