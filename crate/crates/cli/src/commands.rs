use mswt::fock::spin_squared;
use mswt::linalg::expm;
use mswt::msw::{cost_coupling, cost_energy, iterate_sw, minimize_theta, DimerModel, TrialState, DEFAULT_TOL};
use mswt::qsim::{
    iterative_circuit, jordan_wigner, run_statevector, vqe_dimer, NoiseModel, PauliExpectation, SpsaConfig, VqeConfig,
};
use mswt::recursion::coupling_norm;
use mswt::rings::sweep;
use mswt::swgen::generator_operator;
use mswt::Exec;

use crate::config::{BackendName, CostName, RunConfig};
use crate::output::{Cell, Table};

pub const DIMER_VAR_COLUMNS: &[&str] = &[
    "u_over_t",
    "delta_mu_over_t",
    "theta_star",
    "E_heis",
    "E_ionic",
    "E0_exact",
    "E1_exact",
    "coupling_norm",
    "s2",
    "backend",
    "seed",
];

pub const DIMER_ITER_COLUMNS: &[&str] = &[
    "u_over_t",
    "delta_mu_over_t",
    "n_iters",
    "coupling_norm_final",
    "E_heis",
    "E_ionic",
    "J_final",
    "trotterized",
    "E_heis_trotter",
    "E_ionic_trotter",
];

pub const RING_SWEEP_COLUMNS: &[&str] =
    &["n", "u_over_t", "theta_mode", "theta", "e_theta", "e_exact", "rel_error_pct", "bracket_lo", "bracket_hi"];

pub const VQE_COLUMNS: &[&str] = &[
    "u_over_t",
    "theta_star_mean",
    "E_mean",
    "E_stderr",
    "s2_mean",
    "shots",
    "lambda1",
    "lambda2",
    "spsa_iters",
    "seed",
    "state",
    "E_exact",
];

/// Result of one command: the table plus how many grid points failed.
pub struct Outcome {
    pub table: Table,
    pub attempted: usize,
    pub failed: usize,
}

impl Outcome {
    /// 0 when every point succeeded, 3 when all failed, 4 for a mix.
    pub fn exit_code(&self) -> u8 {
        if self.failed == 0 {
            0
        } else if self.failed == self.attempted {
            3
        } else {
            4
        }
    }
}

/// Rows produced by one grid point, with an optional `#` note.
pub struct Point {
    rows: Vec<Vec<Cell>>,
    note: Option<String>,
}

impl Point {
    fn rows(rows: Vec<Vec<Cell>>) -> Self {
        Point { rows, note: None }
    }
}

/// Runs `point` over the grid, keeping successful rows in grid order and
/// turning failures into `#` notes.
fn run_grid<T, F>(
    columns: &'static [&'static str],
    grid: &[T],
    exec: Exec,
    label: impl Fn(&T) -> String,
    point: F,
) -> Outcome
where
    T: Sync,
    F: Fn(&T, Exec) -> mswt::Result<Point> + Sync + Send,
{
    let inner = if exec.is_parallel() && grid.len() > 1 { Exec::Sequential } else { exec };
    let results = exec.map(grid, |g| point(g, inner));
    let mut table = Table::new(columns);
    let mut failed = 0;
    for (g, r) in grid.iter().zip(results) {
        match r {
            Ok(p) => {
                p.rows.into_iter().for_each(|row| table.push(row));
                table.notes.extend(p.note);
            }
            Err(e) => {
                failed += 1;
                table.notes.push(format!("failed {}: {e}", label(g)));
            }
        }
    }
    Outcome { table, attempted: grid.len(), failed }
}

/// Rejects settings that only make sense for some commands.
pub fn check_command(cfg: &RunConfig, command: &str) -> Result<(), String> {
    if command == "dimer-var" && cfg.backend != BackendName::Exact && cfg.dimer_var.cost != CostName::EnergyHeis {
        return Err("circuit backends only minimise the energy-heis cost".into());
    }
    Ok(())
}

fn noise_model(cfg: &RunConfig) -> NoiseModel {
    let v = &cfg.vqe;
    NoiseModel {
        lambda1: v.lambda1,
        lambda2: v.lambda2,
        shots: if v.shots == 0 { None } else { Some(v.shots) },
        seed: cfg.seed,
    }
}

fn vqe_config(cfg: &RunConfig, u: f64, exec: Exec) -> VqeConfig {
    let v = &cfg.vqe;
    let mut c = VqeConfig::new(cfg.model.params(u), cfg.backend.into());
    c.ionic_alpha = cfg.model.resolved_alpha();
    c.noise = noise_model(cfg);
    c.spsa =
        SpsaConfig { max_iter: v.spsa_iters, a: v.spsa_a, c: v.spsa_c, big_a: v.spsa_big_a, ..SpsaConfig::default() };
    c.theta0 = v.theta0;
    c.repetitions = v.repetitions;
    c.exec = exec;
    c
}

pub fn dimer_var(cfg: &RunConfig, exec: Exec) -> Outcome {
    let alpha = cfg.model.resolved_alpha();
    let [lo, hi] = cfg.dimer_var.bracket;
    run_grid(
        DIMER_VAR_COLUMNS,
        &cfg.model.u_grid,
        exec,
        |u| format!("u_over_t={u}"),
        |&u, inner| {
            let model = DimerModel::new(cfg.model.params(u))?;
            let heis = cost_energy(&model, TrialState::Heisenberg)?;
            let ionic = cost_energy(&model, TrialState::Ionic { alpha })?;
            let singlets = model.singlet_energies()?;
            let (theta, e_heis, e_ionic, s2) = if cfg.backend == BackendName::Exact {
                let theta = match cfg.dimer_var.cost {
                    CostName::EnergyHeis => minimize_theta(&heis, (lo, hi), DEFAULT_TOL)?,
                    CostName::EnergyIonic => minimize_theta(&ionic, (lo, hi), DEFAULT_TOL)?,
                    CostName::Coupling => minimize_theta(&cost_coupling(&model), (lo, hi), DEFAULT_TOL)?,
                }
                .theta_star;
                let psi = expm(&(model.s.to_dense() * -theta)) * model.trial(TrialState::Heisenberg);
                let s2 = spin_squared(&model.basis)?.expectation(&psi);
                (theta, heis.eval(theta), ionic.eval(theta), s2)
            } else {
                let r = vqe_dimer(&vqe_config(cfg, u, inner))?;
                (r.theta_star, r.e_heis.mean, r.e_ionic.mean, r.s2_heis.mean)
            };
            let norm = coupling_norm(&model.hbar(theta), &model.p)?;
            Ok(Point::rows(vec![vec![
                u.into(),
                cfg.model.delta_mu.into(),
                theta.into(),
                e_heis.into(),
                e_ionic.into(),
                singlets[0].into(),
                singlets[1].into(),
                norm.into(),
                s2.into(),
                mswt::qsim::Backend::from(cfg.backend).to_string().into(),
                cfg.seed.into(),
            ]]))
        },
    )
}

pub fn dimer_iter(cfg: &RunConfig, exec: Exec) -> Outcome {
    let alpha = cfg.model.resolved_alpha();
    let it = &cfg.dimer_iter;
    run_grid(
        DIMER_ITER_COLUMNS,
        &cfg.model.u_grid,
        exec,
        |u| format!("u_over_t={u}"),
        |&u, _| {
            let params = cfg.model.params(u);
            let trace = iterate_sw(&params, it.n_iters, it.tol)?;
            let model = DimerModel::new(params.clone())?;
            let last = trace.last();
            let heis = TrialState::Heisenberg;
            let ionic = TrialState::Ionic { alpha };
            let (th, ti) = if it.trotterized {
                let gens = trace
                    .steps
                    .iter()
                    .map(|s| jordan_wigner(&generator_operator(&s.lambdas), 4))
                    .collect::<mswt::Result<Vec<_>>>()?;
                let h = jordan_wigner(&(params.local_operator() + params.kinetic_operator()), 4)?;
                let e = |t| -> mswt::Result<f64> { Ok(run_statevector(&iterative_circuit(t, &gens)?).expectation(&h)) };
                (e(heis)?, e(ionic)?)
            } else {
                (f64::NAN, f64::NAN)
            };
            // A halted iteration still yields a valid row for the completed steps.
            let note = trace.halted.as_ref().map(|e| format!("halted u_over_t={u}: {e}"));
            let row = vec![
                u.into(),
                cfg.model.delta_mu.into(),
                (trace.steps.len() - 1).into(),
                last.coupling_norm.into(),
                last.hbar.expectation(&model.trial(heis)).into(),
                last.hbar.expectation(&model.trial(ionic)).into(),
                last.fit.j.into(),
                it.trotterized.into(),
                th.into(),
                ti.into(),
            ];
            Ok(Point { rows: vec![row], note })
        },
    )
}

pub fn ring_sweep(cfg: &RunConfig, exec: Exec) -> Outcome {
    let r = &cfg.ring_sweep;
    let table = sweep(&r.sizes, &r.u_grid, exec);
    let mut out = Table::new(RING_SWEEP_COLUMNS);
    for p in &table.points {
        out.push(vec![
            p.n.into(),
            p.u_over_t.into(),
            p.theta_mode.to_string().into(),
            p.theta.into(),
            p.e_theta.into(),
            p.e_exact.into(),
            p.rel_error_pct.into(),
            p.bracket.0.into(),
            p.bracket.1.into(),
        ]);
    }
    for f in &table.failures {
        out.notes.push(format!("failed n={} u_over_t={}: {}", f.n, f.u_over_t, f.error));
    }
    Outcome { table: out, attempted: r.sizes.len() * r.u_grid.len(), failed: table.failures.len() }
}

pub fn vqe(cfg: &RunConfig, exec: Exec) -> Outcome {
    let noisy = cfg.backend == BackendName::Noisy;
    let v = &cfg.vqe;
    let shots: Cell = if noisy && v.shots > 0 { v.shots.into() } else { f64::INFINITY.into() };
    let (l1, l2, iters) = if noisy { (v.lambda1, v.lambda2, v.spsa_iters) } else { (0.0, 0.0, 0) };
    run_grid(
        VQE_COLUMNS,
        &cfg.model.u_grid,
        exec,
        |u| format!("u_over_t={u}"),
        |&u, inner| {
            let r = vqe_dimer(&vqe_config(cfg, u, inner))?;
            let row = |state: &str, e: mswt::qsim::Estimate, s2: f64, exact: f64| {
                vec![
                    u.into(),
                    r.theta_star.into(),
                    e.mean.into(),
                    e.stderr.into(),
                    s2.into(),
                    shots.clone(),
                    l1.into(),
                    l2.into(),
                    iters.into(),
                    cfg.seed.into(),
                    state.into(),
                    exact.into(),
                ]
            };
            Ok(Point::rows(vec![
                row("heis", r.e_heis, r.s2_heis.mean, r.e0_exact),
                row("ionic", r.e_ionic, r.s2_ionic.mean, r.e1_exact),
            ]))
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(xs: &[f64]) -> Outcome {
        run_grid(
            &["x"],
            xs,
            Exec::Parallel,
            |x| format!("x={x}"),
            |&x, _| {
                if x < 0.0 {
                    Err(mswt::Error::NonFinite(x))
                } else {
                    Ok(Point::rows(vec![vec![x.into()]]))
                }
            },
        )
    }

    #[test]
    fn exit_codes_follow_failures() {
        assert_eq!(grid(&[]).exit_code(), 0);
        assert_eq!(grid(&[1.0, 2.0]).exit_code(), 0);
        let partial = grid(&[1.0, -1.0, 2.0]);
        assert_eq!(partial.exit_code(), 4);
        assert_eq!(partial.table.rows, vec![vec![Cell::F(1.0)], vec![Cell::F(2.0)]]);
        assert_eq!(partial.table.notes.len(), 1);
        assert_eq!(grid(&[-1.0]).exit_code(), 3);
    }
}
