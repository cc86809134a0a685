//! Qubit encoding and circuit simulation for the dimer eigensolver.

mod circuit;
mod estimate;
mod pauli;
mod sim;
mod spsa;
mod vqe;

pub use circuit::{prepare_state, trotter_circuit, Circuit, Gate, GateCounts};
pub use estimate::{estimate_expectation, rng_stream};
pub use pauli::{jordan_wigner, PauliString, PauliSum, PauliTerm, PAULI_DROP_TOL};
pub use sim::{
    apply_gate, run_density, run_statevector, run_statevector_from, DensityMatrix, NoiseModel, PauliExpectation,
    Statevector, DEFAULT_LAMBDA1, DEFAULT_LAMBDA2, DEFAULT_SHOTS,
};
pub use spsa::{spsa_minimize, SpsaConfig, SpsaTrace};
pub use vqe::{iterative_circuit, vqe_dimer, Backend, DimerCircuits, Estimate, VqeConfig, VqeResult};
