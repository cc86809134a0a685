use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::Path;

use serde::{Deserialize, Serialize};

use mswt::msw::DEFAULT_MAX_ITER;
use mswt::qsim::{DEFAULT_LAMBDA1, DEFAULT_LAMBDA2, DEFAULT_SHOTS};

/// Full run configuration. Every table is optional in the file; the
/// resolved value (defaults and command-line overrides applied) is written
/// next to each CSV.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub backend: BackendName,
    pub model: ModelConfig,
    pub dimer_var: DimerVarConfig,
    pub dimer_iter: DimerIterConfig,
    pub ring_sweep: RingSweepConfig,
    pub vqe: VqeSection,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendName {
    #[default]
    Exact,
    Statevector,
    Noisy,
}

impl From<BackendName> for mswt::qsim::Backend {
    fn from(b: BackendName) -> Self {
        match b {
            BackendName::Exact => mswt::qsim::Backend::Exact,
            BackendName::Statevector => mswt::qsim::Backend::Statevector,
            BackendName::Noisy => mswt::qsim::Backend::Noisy,
        }
    }
}

/// Dimer parameters in units of `t`: site energies `±Δμ/2`, equal `U` on
/// both sites, one row per `U` in the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub t: f64,
    pub delta_mu: f64,
    pub u_grid: Vec<f64>,
    /// Ionic trial angle; defaults to the lower-energy ionic combination.
    pub ionic_alpha: Option<f64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { t: 1.0, delta_mu: 0.0, u_grid: vec![1.0, 2.0, 4.0, 8.0, 20.0], ionic_alpha: None }
    }
}

impl ModelConfig {
    pub fn params(&self, u: f64) -> mswt::fock::HubbardParams {
        mswt::fock::HubbardParams::dimer(self.t, [self.delta_mu / 2.0, -self.delta_mu / 2.0], [u, u])
    }

    /// `-π/4` for a symmetric dimer (the ionic singlet), otherwise the
    /// configuration with both electrons on the lower site.
    pub fn resolved_alpha(&self) -> f64 {
        self.ionic_alpha.unwrap_or(if self.delta_mu == 0.0 {
            -FRAC_PI_4
        } else if self.delta_mu > 0.0 {
            FRAC_PI_2
        } else {
            0.0
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostName {
    #[default]
    EnergyHeis,
    EnergyIonic,
    Coupling,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimerVarConfig {
    pub cost: CostName,
    pub bracket: [f64; 2],
}

impl Default for DimerVarConfig {
    fn default() -> Self {
        DimerVarConfig { cost: CostName::EnergyHeis, bracket: [0.0, 1.5] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimerIterConfig {
    pub n_iters: usize,
    pub tol: f64,
    pub trotterized: bool,
}

impl Default for DimerIterConfig {
    fn default() -> Self {
        DimerIterConfig { n_iters: DEFAULT_MAX_ITER, tol: 1e-10, trotterized: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RingSweepConfig {
    pub sizes: Vec<usize>,
    pub u_grid: Vec<f64>,
}

impl Default for RingSweepConfig {
    fn default() -> Self {
        RingSweepConfig { sizes: vec![2, 4, 6, 8], u_grid: vec![4.0, 8.0, 20.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqeSection {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Shots per Pauli string; 0 means exact expectation values.
    pub shots: u64,
    pub repetitions: usize,
    pub spsa_iters: usize,
    pub spsa_a: f64,
    pub spsa_c: f64,
    pub spsa_big_a: f64,
    pub theta0: f64,
}

impl Default for VqeSection {
    fn default() -> Self {
        VqeSection {
            lambda1: DEFAULT_LAMBDA1,
            lambda2: DEFAULT_LAMBDA2,
            shots: DEFAULT_SHOTS,
            repetitions: 100,
            spsa_iters: 1000,
            spsa_a: 0.1,
            spsa_c: 0.1,
            spsa_big_a: 100.0,
            theta0: 1.0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), String> {
        let m = &self.model;
        if !(m.t.is_finite() && m.t != 0.0) || !m.delta_mu.is_finite() {
            return Err("model.t must be finite and nonzero, model.delta_mu finite".into());
        }
        if let Some(u) = m.u_grid.iter().find(|u| !(u.is_finite() && **u > 0.0)) {
            return Err(format!("model.u_grid entries must be positive, got {u}"));
        }
        let [lo, hi] = self.dimer_var.bracket;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(format!("dimer_var.bracket must be increasing, got [{lo}, {hi}]"));
        }
        if let Some(n) = self.ring_sweep.sizes.iter().find(|&&n| n < 2 || n % 2 == 1 || n > mswt::rings::MAX_RING_SITES)
        {
            return Err(format!(
                "ring_sweep.sizes must be even and between 2 and {}, got {n}",
                mswt::rings::MAX_RING_SITES
            ));
        }
        if let Some(u) = self.ring_sweep.u_grid.iter().find(|u| !(u.is_finite() && **u > 0.0)) {
            return Err(format!("ring_sweep.u_grid entries must be positive, got {u}"));
        }
        let v = &self.vqe;
        if v.repetitions == 0 {
            return Err("vqe.repetitions must be at least 1".into());
        }
        for (name, l) in [("lambda1", v.lambda1), ("lambda2", v.lambda2)] {
            if !(0.0..=1.0).contains(&l) {
                return Err(format!("vqe.{name} must lie in [0, 1], got {l}"));
            }
        }
        Ok(())
    }
}
