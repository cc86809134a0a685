use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty sector: {n_up} up / {n_down} down electrons on {n_sites} sites")]
    SectorEmpty { n_sites: usize, n_up: usize, n_down: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator is not hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("cost function returned a non-finite value at theta = {0}")]
    NonFinite(f64),
    #[error("trial state is not normalized (norm {0})")]
    Unnormalized(f64),
    #[error("orbital {orbital} out of range for {n_orbitals} orbitals")]
    OrbitalOutOfRange { orbital: usize, n_orbitals: usize },
    #[error("Pauli term {0} has a non-imaginary coefficient; its exponential is not unitary")]
    NonUnitaryFactor(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("singular iteration update at step {step}: denominator {denominator:e}")]
    SingularUpdate { step: usize, denominator: f64 },
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
}

pub type Result<T> = std::result::Result<T, Error>;
