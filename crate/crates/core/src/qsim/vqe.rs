//! One-parameter eigensolver for the dimer: prepare a trial state, apply the
//! Trotterised `e^{-θS}`, and minimise the Hamiltonian expectation over θ.

use std::fmt;
use std::str::FromStr;

use super::circuit::{prepare_state, trotter_circuit, Circuit, GateCounts};
use super::estimate::{estimate_expectation, rng_stream};
use super::pauli::{jordan_wigner, PauliSum};
use super::sim::{run_density, run_statevector, NoiseModel, PauliExpectation};
use super::spsa::{spsa_minimize, SpsaConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{spin_squared_operator, HubbardParams};
use crate::linalg::expm;
use crate::msw::{cost_energy, minimize_theta, DimerModel, TrialState, DEFAULT_BRACKET, DEFAULT_TOL};
use crate::swgen::{generator_operator, LambdaTable};

const N_QUBITS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    /// Dense matrix exponential, deterministic θ search.
    #[default]
    Exact,
    /// Noiseless Trotterised circuit, deterministic θ search.
    Statevector,
    /// Depolarising density matrix with shot sampling, SPSA θ search.
    Noisy,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Statevector => "statevector",
            Backend::Noisy => "noisy",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "statevector" => Ok(Backend::Statevector),
            "noisy" => Ok(Backend::Noisy),
            other => Err(Error::InvalidParams(format!("unknown backend {other:?}"))),
        }
    }
}

/// Qubit images of the dimer Hamiltonian, generator and total spin.
#[derive(Clone, Debug)]
pub struct DimerCircuits {
    pub hamiltonian: PauliSum,
    pub generator: PauliSum,
    pub s2: PauliSum,
}

impl DimerCircuits {
    pub fn new(params: &HubbardParams, lambdas: &LambdaTable) -> Result<Self> {
        let h = params.local_operator() + params.kinetic_operator();
        Ok(DimerCircuits {
            hamiltonian: jordan_wigner(&h, N_QUBITS)?,
            generator: jordan_wigner(&generator_operator(lambdas), N_QUBITS)?,
            s2: jordan_wigner(&spin_squared_operator(2), N_QUBITS)?,
        })
    }

    /// State preparation followed by the Trotterised `e^{-θS}`.
    pub fn ansatz(&self, trial: TrialState, theta: f64) -> Result<Circuit> {
        let mut c = prepare_state(trial);
        c.extend(&trotter_circuit(&self.generator, -theta)?);
        Ok(c)
    }
}

/// Circuit for `e^{-S₀} e^{-S₁} ... e^{-S_s} |Φ⟩`, the state whose energy
/// equals `⟨Φ|H̄⁽ˢ⁾|Φ⟩` after `s` iterative steps.
pub fn iterative_circuit(trial: TrialState, generators: &[PauliSum]) -> Result<Circuit> {
    let mut c = prepare_state(trial);
    for g in generators.iter().rev() {
        c.extend(&trotter_circuit(g, -1.0)?);
    }
    Ok(c)
}

#[derive(Clone, Debug)]
pub struct VqeConfig {
    pub params: HubbardParams,
    pub ionic_alpha: f64,
    pub backend: Backend,
    /// Used by the noisy backend; its seed is the master seed.
    pub noise: NoiseModel,
    pub spsa: SpsaConfig,
    pub theta0: f64,
    pub repetitions: usize,
    pub exec: Exec,
}

impl VqeConfig {
    pub fn new(params: HubbardParams, backend: Backend) -> Self {
        VqeConfig {
            params,
            ionic_alpha: -std::f64::consts::FRAC_PI_4,
            backend,
            noise: NoiseModel::default(),
            spsa: SpsaConfig::default(),
            theta0: 1.0,
            repetitions: 100,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(v: f64) -> Self {
        Estimate { mean: v, stderr: 0.0 }
    }

    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Estimate { mean, stderr: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Estimate { mean, stderr: (var / n).sqrt() }
    }
}

#[derive(Clone, Debug)]
pub struct VqeResult {
    pub backend: Backend,
    pub theta_star: f64,
    /// SPSA iterates (noisy backend only).
    pub iterates: Vec<f64>,
    pub e_heis: Estimate,
    pub e_ionic: Estimate,
    pub s2_heis: Estimate,
    pub s2_ionic: Estimate,
    /// Lowest two singlet energies of the exact Hamiltonian.
    pub e0_exact: f64,
    pub e1_exact: f64,
    pub repetitions: usize,
    pub gate_counts: GateCounts,
    pub gate_counts_optimized: GateCounts,
}

impl VqeResult {
    pub fn ground_relative_error(&self) -> f64 {
        ((self.e_heis.mean - self.e0_exact) / self.e0_exact).abs()
    }

    pub fn excited_relative_error(&self) -> f64 {
        ((self.e_ionic.mean - self.e1_exact) / self.e1_exact).abs()
    }
}

/// Optimise θ on the Heisenberg state, then evaluate both trial states at θ*.
pub fn vqe_dimer(config: &VqeConfig) -> Result<VqeResult> {
    if config.repetitions == 0 {
        return Err(Error::InvalidParams("repetitions must be at least 1".into()));
    }
    config.noise.validate()?;
    let model = DimerModel::new(config.params.clone())?;
    let circuits = DimerCircuits::new(&config.params, &model.lambdas)?;
    let singlets = model.singlet_energies()?;
    let (e0_exact, e1_exact) = (singlets[0], singlets[1]);
    let heis = TrialState::Heisenberg;
    let ionic = TrialState::Ionic { alpha: config.ionic_alpha };

    let ansatz = circuits.ansatz(heis, model_theta_hint(config))?;
    let gate_counts = ansatz.gate_counts();
    let gate_counts_optimized = {
        let opt = ansatz.compile().optimize();
        opt.gate_counts()
    };

    let mut iterates = Vec::new();
    let (theta_star, e_heis, e_ionic, s2_heis, s2_ionic) = match config.backend {
        Backend::Exact => {
            let theta = minimize_theta(&cost_energy(&model, heis)?, DEFAULT_BRACKET, DEFAULT_TOL)?.theta_star;
            let u = expm(&(model.s.to_dense() * -theta));
            let s2 = crate::fock::spin_squared(&model.basis)?;
            let state = |t: TrialState| &u * model.trial(t);
            let (ph, pi) = (state(heis), state(ionic));
            (
                theta,
                Estimate::exact(model.h.expectation(&ph)),
                Estimate::exact(model.h.expectation(&pi)),
                Estimate::exact(s2.expectation(&ph)),
                Estimate::exact(s2.expectation(&pi)),
            )
        }
        Backend::Statevector => {
            let energy = |th: f64| -> f64 {
                let c = circuits.ansatz(heis, th).expect("anti-Hermitian generator");
                run_statevector(&c).expectation(&circuits.hamiltonian)
            };
            let cost = crate::msw::ThetaCost::new(crate::msw::CostKind::EnergyHeis, energy);
            let theta = minimize_theta(&cost, DEFAULT_BRACKET, DEFAULT_TOL)?.theta_star;
            let ph = run_statevector(&circuits.ansatz(heis, theta)?);
            let pi = run_statevector(&circuits.ansatz(ionic, theta)?);
            (
                theta,
                Estimate::exact(ph.expectation(&circuits.hamiltonian)),
                Estimate::exact(pi.expectation(&circuits.hamiltonian)),
                Estimate::exact(ph.expectation(&circuits.s2)),
                Estimate::exact(pi.expectation(&circuits.s2)),
            )
        }
        Backend::Noisy => {
            let noise = config.noise;
            let trace = spsa_minimize(
                |th, rng| {
                    let c = circuits.ansatz(heis, th).expect("anti-Hermitian generator");
                    let rho = run_density(&c, &noise).expect("validated noise");
                    estimate_expectation(&rho, &circuits.hamiltonian, noise.shots, rng)
                },
                config.theta0,
                &config.spsa,
                noise.seed,
            );
            let theta = trace.theta_star;
            iterates = trace.iterates;
            let rho_h = run_density(&circuits.ansatz(heis, theta)?, &noise)?;
            let rho_i = run_density(&circuits.ansatz(ionic, theta)?, &noise)?;
            let samples = config.exec.map_range(config.repetitions, |r| {
                let mut rng = rng_stream(noise.seed, 1 + r as u64);
                [
                    estimate_expectation(&rho_h, &circuits.hamiltonian, noise.shots, &mut rng),
                    estimate_expectation(&rho_i, &circuits.hamiltonian, noise.shots, &mut rng),
                    estimate_expectation(&rho_h, &circuits.s2, noise.shots, &mut rng),
                    estimate_expectation(&rho_i, &circuits.s2, noise.shots, &mut rng),
                ]
            });
            let col = |k: usize| Estimate::from_samples(&samples.iter().map(|s| s[k]).collect::<Vec<_>>());
            (theta, col(0), col(1), col(2), col(3))
        }
    };

    Ok(VqeResult {
        backend: config.backend,
        theta_star,
        iterates,
        e_heis,
        e_ionic,
        s2_heis,
        s2_ionic,
        e0_exact,
        e1_exact,
        repetitions: config.repetitions,
        gate_counts,
        gate_counts_optimized,
    })
}

// Gate counts do not depend on θ; any nonzero value keeps every term.
fn model_theta_hint(config: &VqeConfig) -> f64 {
    config.theta0.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::pauli::PauliString;

    #[test]
    fn generator_contains_fig_term() {
        let model = DimerModel::new(HubbardParams::homogeneous_dimer(1.0, 4.0)).unwrap();
        let c = DimerCircuits::new(&model.params, &model.lambdas).unwrap();
        assert!(c.generator.is_anti_hermitian(1e-14));
        assert!(c.hamiltonian.is_hermitian(1e-14));
        let xzyz = c.generator.coefficient(&PauliString::from_label("XZYZ").unwrap());
        assert!(xzyz.norm() > 1e-3);
    }

    #[test]
    fn exact_backend_hits_spectrum() {
        let mut cfg = VqeConfig::new(HubbardParams::homogeneous_dimer(1.0, 4.0), Backend::Exact);
        cfg.repetitions = 1;
        let r = vqe_dimer(&cfg).unwrap();
        assert!((r.e_heis.mean - r.e0_exact).abs() < 1e-6);
        assert!((r.e_ionic.mean - r.e1_exact).abs() < 1e-6);
        assert!((r.theta_star - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
        assert!(r.s2_heis.mean.abs() < 1e-10);
    }

    #[test]
    fn zero_repetitions_rejected() {
        let mut cfg = VqeConfig::new(HubbardParams::homogeneous_dimer(1.0, 4.0), Backend::Exact);
        cfg.repetitions = 0;
        assert!(matches!(vqe_dimer(&cfg), Err(Error::InvalidParams(_))));
    }
}
