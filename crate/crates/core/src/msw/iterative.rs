//! Repeated SW transformations on the residual coupling.
//!
//! Step `s = 0` is the standard transformation. Each further step reads the
//! channel integrals off `H̄⁽ˢ⁻¹⁾ - H0`, solves the first-order condition for
//! new channel-1/2 coefficients with the renormalised denominators
//!
//! ```text
//! B₁ = (Δμ + U_i) + 3K₁ - K₂ + 2J,   B₂ = (Δμ - U_j) + 3K₂ - K₁ - 2J,
//! λ₁ = (2 T₂ L + T₁ B₂) / (4L² + B₁B₂),
//! λ₂ = (-2 T₁ L + T₂ B₁) / (4L² + B₁B₂),
//! ```
//!
//! where `J = (K₁ - K₂)/2` is the exchange integral with the opposite sign to
//! the operator coefficient [`ChannelFit::j`], and applies `e^{S'}` to the
//! stored dense `H̄`.
//!
//! Work happens in the half-filled `(2,1,1)` sector. Channels 0 and 3 never
//! act there, so their coefficients after `s = 0` are set to zero.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::variational::DimerModel;
use crate::error::{Error, Result};
use crate::fock::{HubbardParams, MatrixOperator};
use crate::recursion::{coupling_norm, reconstruct, similarity_transform, IntegralTable, Order, PairIntegrals};
use crate::swgen::{build_generator, LambdaTable};

/// Integrals read off an effective Hamiltonian, pair `(0, 1)` orientation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelFit {
    pub t1: f64,
    pub t2: f64,
    pub k1: f64,
    pub k2: f64,
    /// Coefficient of the exchange operator `½(γ_ijσ γ_jiσ̄ + h.c.)`.
    pub j: f64,
    pub l: f64,
    /// Frobenius norm of the part not captured by the six channel operators.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct IterationStep {
    pub s: usize,
    pub lambdas: LambdaTable,
    pub coupling_norm: f64,
    pub hbar: MatrixOperator,
    pub fit: ChannelFit,
}

#[derive(Clone, Debug)]
pub struct IterationTrace {
    pub steps: Vec<IterationStep>,
    pub converged: bool,
    /// Set when an update denominator vanished; the trace stops before it.
    pub halted: Option<Error>,
}

impl IterationTrace {
    pub fn last(&self) -> &IterationStep {
        self.steps.last().expect("trace holds the s = 0 step")
    }

    pub fn coupling_norms(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.coupling_norm).collect()
    }
}

pub const DEFAULT_MAX_ITER: usize = 3;
pub const DEFAULT_ITER_TOL: f64 = 1e-10;
const SINGULAR_DENOMINATOR: f64 = 1e-300;

/// Unit-coefficient operators of the six channel integrals of the `(0,1)`
/// pair, each paired with its `(1,0)` partner (`T₁₀,ₓ = T₀₁,₃₋ₓ`,
/// `K₁₀,ₓ = -K₀₁,₃₋ₓ`, shared `J`, `L`).
fn channel_basis(model: &DimerModel) -> Result<Vec<DMatrix<f64>>> {
    let mut out = Vec::with_capacity(6);
    for slot in 0..6 {
        let mut a = PairIntegrals::default();
        let mut b = PairIntegrals::default();
        match slot {
            0 => (a.t[1], b.t[2]) = (1.0, 1.0),
            1 => (a.t[2], b.t[1]) = (1.0, 1.0),
            2 => (a.k[1], b.k[2]) = (1.0, -1.0),
            3 => (a.k[2], b.k[1]) = (1.0, -1.0),
            4 => (a.j, b.j) = (1.0, 1.0),
            _ => (a.l, b.l) = (1.0, 1.0),
        }
        let table = IntegralTable {
            order: Order::Summed,
            theta: 1.0,
            n_sites: 2,
            entries: [((0, 1), a), ((1, 0), b)].into_iter().collect(),
        };
        out.push(reconstruct(&table, &model.basis)?.to_dense());
    }
    Ok(out)
}

/// Least-squares projection of `H̄ - H0` onto the channel operators.
pub fn fit_channels(model: &DimerModel, hbar: &MatrixOperator) -> Result<ChannelFit> {
    let ops = channel_basis(model)?;
    let target = hbar.to_dense() - model.h0.to_dense();
    let n = target.len();
    let a = DMatrix::from_fn(n, ops.len(), |r, c| ops[c].as_slice()[r]);
    let b = DVector::from_column_slice(target.as_slice());
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::NoConvergence(format!("channel fit failed: {e}")))?;
    let residual = (&a * &coef - &b).norm();
    Ok(ChannelFit { t1: coef[0], t2: coef[1], k1: coef[2], k2: coef[3], j: coef[4], l: coef[5], residual })
}

/// New channel-1/2 coefficients from the fitted integrals.
pub fn update_lambdas(params: &HubbardParams, fit: &ChannelFit) -> std::result::Result<[f64; 2], f64> {
    let dmu = params.mu[0] - params.mu[1];
    let j = -fit.j;
    let b1 = dmu + params.u[0] + 3.0 * fit.k1 - fit.k2 + 2.0 * j;
    let b2 = dmu - params.u[1] + 3.0 * fit.k2 - fit.k1 - 2.0 * j;
    let den = 4.0 * fit.l * fit.l + b1 * b2;
    if den.abs() < SINGULAR_DENOMINATOR || !den.is_finite() {
        return Err(den);
    }
    Ok([(2.0 * fit.t2 * fit.l + fit.t1 * b2) / den, (-2.0 * fit.t1 * fit.l + fit.t2 * b1) / den])
}

/// Run `s = 0..=max_iter` unless the coupling norm drops to `tol` first.
pub fn iterate_sw(params: &HubbardParams, max_iter: usize, tol: f64) -> Result<IterationTrace> {
    let model = DimerModel::new(params.clone())?;
    let basis = model.basis.clone();
    let t01 = params.t[(0, 1)];

    let h = model.h.to_dense();
    let hbar = model.h.with_dense(similarity_transform(&h, &model.s.to_dense(), 1.0));
    let mut steps = vec![IterationStep {
        s: 0,
        lambdas: model.lambdas.clone(),
        coupling_norm: coupling_norm(&hbar, &model.p)?,
        fit: fit_channels(&model, &hbar)?,
        hbar,
    }];
    let mut halted = None;
    for s in 1..=max_iter {
        let prev = steps.last().unwrap();
        if prev.coupling_norm <= tol {
            break;
        }
        let [l1, l2] = match update_lambdas(params, &prev.fit) {
            Ok(l) => l,
            Err(den) => {
                halted = Some(Error::SingularUpdate { step: s, denominator: den });
                break;
            }
        };
        let mut lambdas = LambdaTable::new(2);
        lambdas.insert(0, 1, t01, [0.0, l1, l2, 0.0]);
        let gen = build_generator(&lambdas, &Arc::clone(&basis))?;
        let hbar = prev.hbar.with_dense(similarity_transform(&prev.hbar.to_dense(), &gen.to_dense(), 1.0));
        steps.push(IterationStep {
            s,
            lambdas,
            coupling_norm: coupling_norm(&hbar, &model.p)?,
            fit: fit_channels(&model, &hbar)?,
            hbar,
        });
    }
    let converged = steps.last().unwrap().coupling_norm <= tol;
    Ok(IterationTrace { steps, converged, halted })
}
