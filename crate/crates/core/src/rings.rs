//! Homogeneous half-filled rings probed with the Heisenberg ground state.
//!
//! The spin ground state is embedded into the fermionic half-filled sector,
//! rotated with `e^{-θS}` (Krylov action, never a dense exponential), and
//! its energy compared against the exact ring ground state.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{build_basis, exact_eigensolve_with, orbital, Basis, FockState, HubbardParams, MatrixOperator, Spin};
use crate::linalg::{expv, sym_eigen_sorted, KrylovOptions};
use crate::msw::{minimize_theta, CostKind, ThetaCost, DEFAULT_TOL};
use crate::swgen::{build_generator_with, sw_lambdas};

pub const MAX_RING_SITES: usize = 10;
pub const RING_BRACKET: (f64, f64) = (0.0, 1.2);

/// Ground state of `Σ_bonds s_i·s_j` in the `S_z = 0` sector. Bit `i` of a
/// configuration is set when site `i` carries spin up.
#[derive(Clone, Debug)]
pub struct SpinState {
    pub n_sites: usize,
    pub configs: Vec<u64>,
    pub amps: DVector<f64>,
    /// Eigenvalue of `Σ_bonds s_i·s_j`.
    pub energy: f64,
}

fn check_ring_size(n: usize) -> Result<()> {
    if n < 2 || n % 2 == 1 || n > MAX_RING_SITES {
        return Err(Error::InvalidParams(format!("ring size must be even and in 2..={MAX_RING_SITES}, got {n}")));
    }
    Ok(())
}

pub fn heisenberg_ground(n: usize) -> Result<SpinState> {
    check_ring_size(n)?;
    let bonds = HubbardParams::ring(n, 1.0, 0.0).bonds();
    let configs: Vec<u64> = (0..1u64 << n).filter(|c| c.count_ones() as usize == n / 2).collect();
    let index = |c: u64| configs.binary_search(&c).expect("S_z preserved");
    let d = configs.len();
    let mut h = DMatrix::zeros(d, d);
    for (k, &c) in configs.iter().enumerate() {
        for &(i, j) in &bonds {
            let (si, sj) = (c >> i & 1, c >> j & 1);
            if si == sj {
                h[(k, k)] += 0.25;
            } else {
                h[(k, k)] -= 0.25;
                h[(index(c ^ (1 << i) ^ (1 << j)), k)] += 0.5;
            }
        }
    }
    let (energy, mut amps) = sym_eigen_sorted(&h).swap_remove(0);
    // Fix the overall sign: largest-magnitude amplitude positive.
    let lead = amps.iamax();
    if amps[lead] < 0.0 {
        amps.neg_mut();
    }
    Ok(SpinState { n_sites: n, configs, amps, energy })
}

/// Map each spin configuration to the singly occupied Fock state with
/// creation operators in ascending orbital order (sign +1).
pub fn embed(spin: &SpinState, basis: &Basis) -> Result<DVector<f64>> {
    if basis.n_sites() != spin.n_sites {
        return Err(Error::DimensionMismatch { expected: spin.n_sites, got: basis.n_sites() });
    }
    let mut v = DVector::zeros(basis.dim());
    for (&c, &a) in spin.configs.iter().zip(spin.amps.iter()) {
        let bits = (0..spin.n_sites).fold(0u64, |acc, i| {
            let s = if c >> i & 1 == 1 { Spin::Up } else { Spin::Down };
            acc | 1 << orbital(i, s)
        });
        let k = basis
            .index_of(FockState(bits))
            .ok_or_else(|| Error::InvalidParams("basis lacks a singly occupied configuration".into()))?;
        v[k] = a;
    }
    Ok(v)
}

/// `e^{-θS} state` by Arnoldi.
pub fn apply_generator_exp(s: &MatrixOperator, theta: f64, state: &DVector<f64>, exec: Exec) -> Result<DVector<f64>> {
    if theta == 0.0 {
        return Ok(state.clone());
    }
    expv(|x| s.matvec_with(x, exec), state, -theta, KrylovOptions::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaMode {
    Fixed1,
    Optimized,
}

impl fmt::Display for ThetaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaMode::Fixed1 => "fixed-1",
            ThetaMode::Optimized => "optimized",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub n: usize,
    pub u_over_t: f64,
    pub theta_mode: ThetaMode,
    pub theta: f64,
    pub e_theta: f64,
    pub e_exact: f64,
    pub rel_error_pct: f64,
    pub bracket: (f64, f64),
}

/// Everything needed to evaluate `E(θ) = ⟨Φ|e^{θS} H e^{-θS}|Φ⟩` on a ring.
#[derive(Clone, Debug)]
pub struct RingModel {
    pub params: HubbardParams,
    pub basis: Arc<Basis>,
    pub h: MatrixOperator,
    pub s: MatrixOperator,
    pub phi: DVector<f64>,
    pub spin: SpinState,
    pub e_exact: f64,
    pub exec: Exec,
}

impl RingModel {
    pub fn new(n: usize, t: f64, u: f64, exec: Exec) -> Result<Self> {
        check_ring_size(n)?;
        let params = HubbardParams::ring(n, t, u);
        params.validate()?;
        let basis = Arc::new(build_basis(n, n / 2, n / 2)?);
        let h = (params.local_operator() + params.kinetic_operator()).matrix(&basis, exec)?;
        let s = build_generator_with(&sw_lambdas(&params)?, &basis, exec)?;
        let spin = heisenberg_ground(n)?;
        let phi = embed(&spin, &basis)?;
        let e_exact = exact_eigensolve_with(&h, 1, exec)?[0].0;
        Ok(RingModel { params, basis, h, s, phi, spin, e_exact, exec })
    }

    pub fn state(&self, theta: f64) -> Result<DVector<f64>> {
        apply_generator_exp(&self.s, theta, &self.phi, self.exec)
    }

    pub fn energy(&self, theta: f64) -> Result<f64> {
        let psi = self.state(theta)?;
        Ok(psi.dot(&self.h.matvec_with(&psi, self.exec)))
    }

    /// `E'(θ) = -2 (Sψ)·(Hψ)`
    pub fn energy_gradient(&self, theta: f64) -> Result<f64> {
        let psi = self.state(theta)?;
        Ok(-2.0 * self.s.matvec_with(&psi, self.exec).dot(&self.h.matvec_with(&psi, self.exec)))
    }

    pub fn point(&self, mode: ThetaMode) -> Result<SweepPoint> {
        let (theta, e_theta) = match mode {
            ThetaMode::Fixed1 => (1.0, self.energy(1.0)?),
            ThetaMode::Optimized => {
                let cost = ThetaCost::new(CostKind::EnergyHeis, |th| self.energy(th).unwrap_or(f64::NAN))
                    .with_gradient(|th| self.energy_gradient(th).unwrap_or(f64::NAN));
                let r = minimize_theta(&cost, RING_BRACKET, DEFAULT_TOL)?;
                // θ = 1 lies in the search set; keep it if the search landed higher.
                let e1 = self.energy(1.0)?;
                if e1 < r.value {
                    (1.0, e1)
                } else {
                    (r.theta_star, r.value)
                }
            }
        };
        if !e_theta.is_finite() {
            return Err(Error::NonFinite(e_theta));
        }
        Ok(SweepPoint {
            n: self.params.n_sites,
            u_over_t: self.params.u[0] / self.params.t[(0, 1)],
            theta_mode: mode,
            theta,
            e_theta,
            e_exact: self.e_exact,
            rel_error_pct: 100.0 * ((e_theta - self.e_exact) / self.e_exact).abs(),
            bracket: RING_BRACKET,
        })
    }
}

pub fn ring_relative_error(n: usize, u_over_t: f64, mode: ThetaMode) -> Result<SweepPoint> {
    RingModel::new(n, 1.0, u_over_t, Exec::default())?.point(mode)
}

#[derive(Debug)]
pub struct SweepFailure {
    pub n: usize,
    pub u_over_t: f64,
    pub error: Error,
}

#[derive(Debug, Default)]
pub struct SweepTable {
    /// Both θ modes per grid point, grid order (N outer, U inner).
    pub points: Vec<SweepPoint>,
    pub failures: Vec<SweepFailure>,
}

impl SweepTable {
    pub fn get(&self, n: usize, u_over_t: f64, mode: ThetaMode) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.n == n && p.u_over_t == u_over_t && p.theta_mode == mode)
    }
}

/// Evaluate the Cartesian grid. Grid points run concurrently under
/// `Exec::Parallel`; a failing point is recorded and the rest kept.
pub fn sweep(ns: &[usize], us: &[f64], exec: Exec) -> SweepTable {
    let grid: Vec<(usize, f64)> = ns.iter().flat_map(|&n| us.iter().map(move |&u| (n, u))).collect();
    let inner = if exec.is_parallel() && grid.len() > 1 { Exec::Sequential } else { exec };
    let results = exec.map(&grid, |&(n, u)| {
        RingModel::new(n, 1.0, u, inner).and_then(|m| Ok([m.point(ThetaMode::Fixed1)?, m.point(ThetaMode::Optimized)?]))
    });
    let mut table = SweepTable::default();
    for ((n, u), r) in grid.into_iter().zip(results) {
        match r {
            Ok(pts) => table.points.extend(pts),
            Err(error) => table.failures.push(SweepFailure { n, u_over_t: u, error }),
        }
    }
    table
}
