use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::{
    build_basis, build_hubbard, exact_eigensolve, heisenberg_projector, spin_squared, Basis, FockState, HubbardParams,
    MatrixOperator,
};
use crate::linalg::{commutator, expm};
use crate::recursion::{coupling_norm, similarity_transform};
use crate::swgen::{build_generator, sw_lambdas, LambdaTable};

/// `θ* = (U / 4t) atan(4t / U)`, the exact block-diagonalising scale of the
/// homogeneous dimer.
pub fn theta_analytic(t: f64, u: f64) -> Result<f64> {
    if !(u > 0.0) || t == 0.0 || !t.is_finite() || !u.is_finite() {
        return Err(Error::InvalidParams(format!("theta_analytic needs U > 0 and t != 0 (got t={t}, U={u})")));
    }
    let x = 4.0 * t.abs() / u;
    Ok(x.atan() / x)
}

/// Dimer trial states over the `(2,1,1)` sector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrialState {
    /// `(|1001⟩ - |0110⟩)/√2`, the covalent singlet in this ordering.
    Heisenberg,
    /// `(|1001⟩ + |0110⟩)/√2`; the other sign convention for the covalent
    /// combination. Here it is the `S_z = 0` triplet.
    HeisenbergAlt,
    /// `cos α |1100⟩ + sin α |0011⟩`.
    Ionic { alpha: f64 },
}

impl fmt::Display for TrialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrialState::Heisenberg => write!(f, "heisenberg"),
            TrialState::HeisenbergAlt => write!(f, "heisenberg-alt"),
            TrialState::Ionic { alpha } => write!(f, "ionic({alpha})"),
        }
    }
}

impl TrialState {
    /// Amplitudes over Fock bit values (= qubit basis indices).
    pub fn amplitudes(self) -> Vec<(u64, f64)> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            TrialState::Heisenberg => vec![(0b1001, r), (0b0110, -r)],
            TrialState::HeisenbergAlt => vec![(0b1001, r), (0b0110, r)],
            TrialState::Ionic { alpha } => vec![(0b0011, alpha.cos()), (0b1100, alpha.sin())],
        }
    }

    /// Coefficient vector in `basis` (any dimer basis containing the states).
    pub fn vector(self, basis: &Basis) -> Result<DVector<f64>> {
        if basis.n_sites() != 2 {
            return Err(Error::InvalidParams("dimer trial states need a two-site basis".into()));
        }
        let mut v = DVector::zeros(basis.dim());
        for (bits, a) in self.amplitudes() {
            let i = basis
                .index_of(FockState(bits))
                .ok_or_else(|| Error::InvalidParams(format!("basis lacks {}", FockState(bits).label(4))))?;
            v[i] = a;
        }
        Ok(v)
    }
}

/// Which objective a θ search minimised.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CostKind {
    EnergyHeis,
    EnergyIonic { alpha: f64 },
    CouplingNorm,
    Custom,
}

type ScalarFn<'a> = Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>;

/// Scalar objective in θ, optionally with its derivative.
pub struct ThetaCost<'a> {
    pub kind: CostKind,
    f: ScalarFn<'a>,
    grad: Option<ScalarFn<'a>>,
}

impl<'a> ThetaCost<'a> {
    pub fn new(kind: CostKind, f: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        ThetaCost { kind, f: Box::new(f), grad: None }
    }

    pub fn with_gradient(mut self, g: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        self.grad = Some(Box::new(g));
        self
    }

    pub fn eval(&self, theta: f64) -> f64 {
        (self.f)(theta)
    }

    pub fn gradient(&self, theta: f64) -> Option<f64> {
        self.grad.as_ref().map(|g| g(theta))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalResult {
    pub theta_star: f64,
    pub cost_kind: CostKind,
    pub value: f64,
    pub n_evals: usize,
    pub bracket: (f64, f64),
    /// Minimum sits on (or within tolerance of) a bracket end.
    pub at_bracket_edge: bool,
    /// Cost numerically flat over the bracket; `theta_star` is the midpoint.
    pub degenerate: bool,
}

pub const DEFAULT_BRACKET: (f64, f64) = (0.0, 1.5);
pub const DEFAULT_TOL: f64 = 1e-10;
const GRID_POINTS: usize = 31;

/// Grid scan over the bracket, Brent refinement around the best grid point,
/// and, when the cost carries a derivative, bisection on the derivative to
/// resolve the minimum beyond the `√ε` limit of value-only search.
pub fn minimize_theta(cost: &ThetaCost<'_>, bracket: (f64, f64), tol: f64) -> Result<VariationalResult> {
    let (a, b) = bracket;
    if !(a < b) || !a.is_finite() || !b.is_finite() || !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("bad bracket [{a}, {b}] or tolerance {tol}")));
    }
    let mut n_evals = 0usize;
    let mut eval = |x: f64| -> Result<f64> {
        n_evals += 1;
        let v = cost.eval(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(x))
        }
    };

    let step = (b - a) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| if i == GRID_POINTS - 1 { b } else { a + step * i as f64 }).collect();
    let mut vals = Vec::with_capacity(GRID_POINTS);
    for &x in &grid {
        vals.push(eval(x)?);
    }
    let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if hi - lo <= 1e-13 * (1.0 + lo.abs()) {
        let mid = 0.5 * (a + b);
        let value = eval(mid)?;
        return Ok(VariationalResult {
            theta_star: mid,
            cost_kind: cost.kind,
            value,
            n_evals,
            bracket,
            at_bracket_edge: false,
            degenerate: true,
        });
    }
    let ib = vals.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).unwrap().0;
    let lo_x = grid[ib.saturating_sub(1)];
    let hi_x = grid[(ib + 1).min(GRID_POINTS - 1)];

    let (mut x, mut fx) = brent(&mut eval, lo_x, hi_x, grid[ib], vals[ib], tol)?;

    if let Some(g_lo) = cost.gradient(lo_x) {
        let g_hi = cost.gradient(hi_x).unwrap();
        if g_lo < 0.0 && g_hi > 0.0 {
            let (mut l, mut h) = (lo_x, hi_x);
            while h - l > tol.min(1e-14 * (1.0 + h.abs())) {
                let m = 0.5 * (l + h);
                if m <= l || m >= h {
                    break;
                }
                if cost.gradient(m).unwrap() > 0.0 {
                    h = m;
                } else {
                    l = m;
                }
            }
            let xr = 0.5 * (l + h);
            let fr = eval(xr)?;
            if fr <= fx + 1e-14 * (1.0 + fx.abs()) {
                x = xr;
                fx = fr;
            }
        }
    }
    if vals[ib] < fx {
        x = grid[ib];
        fx = vals[ib];
    }
    let edge_tol = 10.0 * tol;
    Ok(VariationalResult {
        theta_star: x,
        cost_kind: cost.kind,
        value: fx,
        n_evals,
        bracket,
        at_bracket_edge: (x - a).abs() <= edge_tol || (b - x).abs() <= edge_tol,
        degenerate: false,
    })
}

/// Brent's parabolic / golden-section minimiser on `[a, b]` seeded at `x0`.
fn brent<F>(f: &mut F, mut a: f64, mut b: f64, x0: f64, f0: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const CGOLD: f64 = 0.381_966_011_250_105;
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (f0, f0, f0);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = tol + 1e-15 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok((x, fx))
}

/// Two-site model in the half-filled `S_z = 0` sector with its standard
/// generator, ready for θ scans.
#[derive(Clone, Debug)]
pub struct DimerModel {
    pub params: HubbardParams,
    pub basis: Arc<Basis>,
    pub h0: MatrixOperator,
    pub v: MatrixOperator,
    pub h: MatrixOperator,
    pub p: MatrixOperator,
    pub lambdas: LambdaTable,
    pub s: MatrixOperator,
}

impl DimerModel {
    pub fn new(params: HubbardParams) -> Result<Self> {
        if params.n_sites != 2 {
            return Err(Error::InvalidParams(format!("dimer model needs 2 sites, got {}", params.n_sites)));
        }
        let basis = Arc::new(build_basis(2, 1, 1)?);
        let (h0, v) = build_hubbard(&params, &basis)?;
        let h = h0.with_dense(h0.to_dense() + v.to_dense());
        let p = heisenberg_projector(&basis)?;
        let lambdas = sw_lambdas(&params)?;
        let s = build_generator(&lambdas, &basis)?;
        Ok(DimerModel { params, basis, h0, v, h, p, lambdas, s })
    }

    /// `e^{θS} H e^{-θS}`
    pub fn hbar(&self, theta: f64) -> MatrixOperator {
        self.h.with_dense(similarity_transform(&self.h.to_dense(), &self.s.to_dense(), theta))
    }

    pub fn trial(&self, trial: TrialState) -> DVector<f64> {
        trial.vector(&self.basis).expect("dimer sector holds every trial state")
    }

    /// Eigenvalues of `H` whose eigenvectors are spin singlets, ascending.
    pub fn singlet_energies(&self) -> Result<Vec<f64>> {
        let s2 = spin_squared(&self.basis)?;
        Ok(exact_eigensolve(&self.h, self.basis.dim())?
            .into_iter()
            .filter(|(_, v)| s2.expectation(v) < 0.5)
            .map(|(e, _)| e)
            .collect())
    }
}

/// `θ ↦ ⟨Φ| e^{θS} H e^{-θS} |Φ⟩`, with its derivative `ψᵀ[S,H]ψ`.
pub fn cost_energy(model: &DimerModel, trial: TrialState) -> Result<ThetaCost<'static>> {
    let phi = model.trial(trial);
    let norm = phi.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Unnormalized(norm));
    }
    let kind = match trial {
        TrialState::Ionic { alpha } => CostKind::EnergyIonic { alpha },
        _ => CostKind::EnergyHeis,
    };
    let h = model.h.to_dense();
    let s = model.s.to_dense();
    let dh = commutator(&s, &h);
    let (s1, h1, phi1) = (s.clone(), h.clone(), phi.clone());
    let cost = ThetaCost::new(kind, move |th| {
        let psi = expm(&(&s1 * -th)) * &phi1;
        psi.dot(&(&h1 * &psi))
    })
    .with_gradient(move |th| {
        let psi = expm(&(&s * -th)) * &phi;
        psi.dot(&(&dh * &psi))
    });
    Ok(cost)
}

/// `θ ↦ ‖(e^{θS} H e^{-θS})_X‖_F`
pub fn cost_coupling(model: &DimerModel) -> ThetaCost<'static> {
    let h = model.h.clone();
    let s = model.s.to_dense();
    let p = model.p.clone();
    ThetaCost::new(CostKind::CouplingNorm, move |th| {
        let hb = h.with_dense(similarity_transform(&h.to_dense(), &s, th));
        coupling_norm(&hb, &p).expect("shared basis")
    })
}
