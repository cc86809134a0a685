//! Variational and iterative modifications of the SW transformation.

mod iterative;
mod variational;

pub use iterative::{
    fit_channels, iterate_sw, update_lambdas, ChannelFit, IterationStep, IterationTrace, DEFAULT_ITER_TOL,
    DEFAULT_MAX_ITER,
};
pub use variational::{
    cost_coupling, cost_energy, minimize_theta, theta_analytic, CostKind, DimerModel, ThetaCost, TrialState,
    VariationalResult, DEFAULT_BRACKET, DEFAULT_TOL,
};
