use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::circuit::{Circuit, Gate};
use super::pauli::{PauliString, PauliSum};
use crate::error::{Error, Result};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

fn one_qubit_matrix(g: &Gate) -> Option<(usize, [[C; 2]; 2])> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Some(match *g {
        Gate::H(q) => (q, [[C::new(r, 0.0), C::new(r, 0.0)], [C::new(r, 0.0), C::new(-r, 0.0)]]),
        Gate::X(q) => (q, [[ZERO, ONE], [ONE, ZERO]]),
        Gate::RY(q, a) => {
            let (s, c) = (a / 2.0).sin_cos();
            (q, [[C::new(c, 0.0), C::new(-s, 0.0)], [C::new(s, 0.0), C::new(c, 0.0)]])
        }
        Gate::RZ(q, a) => (q, [[C::from_polar(1.0, -a / 2.0), ZERO], [ZERO, C::from_polar(1.0, a / 2.0)]]),
        _ => return None,
    })
}

fn apply_1q(amps: &mut [C], q: usize, u: &[[C; 2]; 2]) {
    let bit = 1usize << q;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let (a, b) = (amps[i], amps[i | bit]);
            amps[i] = u[0][0] * a + u[0][1] * b;
            amps[i | bit] = u[1][0] * a + u[1][1] * b;
        }
    }
}

fn apply_cnot(amps: &mut [C], control: usize, target: usize) {
    let (cb, tb) = (1usize << control, 1usize << target);
    for i in 0..amps.len() {
        if i & cb != 0 && i & tb == 0 {
            amps.swap(i, i | tb);
        }
    }
}

fn apply_pauli(amps: &[C], p: &PauliString) -> Vec<C> {
    let mut out = vec![ZERO; amps.len()];
    for (b, a) in amps.iter().enumerate() {
        let (ph, nb) = p.apply_basis(b as u64);
        out[nb as usize] = ph * a;
    }
    out
}

/// Apply one gate to an amplitude vector over `log2(len)` qubits.
pub fn apply_gate(amps: &mut [C], g: &Gate) {
    match g {
        Gate::Cnot { control, target } => apply_cnot(amps, *control, *target),
        Gate::PauliExp { pauli, angle } => {
            let (s, c) = (angle / 2.0).sin_cos();
            let pa = apply_pauli(amps, pauli);
            for (a, p) in amps.iter_mut().zip(pa) {
                *a = *a * c - C::new(0.0, s) * p;
            }
        }
        _ => {
            let (q, u) = one_qubit_matrix(g).expect("single-qubit gate");
            apply_1q(amps, q, &u);
        }
    }
}

/// Pure state on `n` qubits; amplitude index = computational basis bits.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    pub n_qubits: usize,
    pub amps: Vec<C>,
}

impl Statevector {
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Statevector { n_qubits, amps }
    }

    pub fn from_real(n_qubits: usize, v: &[f64]) -> Result<Self> {
        if v.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << n_qubits, got: v.len() });
        }
        Ok(Statevector { n_qubits, amps: v.iter().map(|&x| C::new(x, 0.0)).collect() })
    }

    /// Embed a real vector given over selected basis indices.
    pub fn from_sparse(n_qubits: usize, entries: &[(u64, f64)]) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        for &(b, a) in entries {
            amps[b as usize] = C::new(a, 0.0);
        }
        Statevector { n_qubits, amps }
    }

    pub fn apply(&mut self, g: &Gate) {
        apply_gate(&mut self.amps, g);
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Statevector) -> C {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &Statevector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn to_dvector(&self) -> DVector<C> {
        DVector::from_column_slice(&self.amps)
    }
}

/// Noise parameters for density-matrix runs: depolarizing strength after
/// every one-qubit gate (`lambda1`) and every CNOT (`lambda2`), plus the shot
/// budget per Pauli term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub lambda1: f64,
    pub lambda2: f64,
    pub shots: Option<u64>,
    pub seed: u64,
}

pub const DEFAULT_LAMBDA1: f64 = 1e-4;
pub const DEFAULT_LAMBDA2: f64 = 1e-3;
pub const DEFAULT_SHOTS: u64 = 8192;

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { lambda1: DEFAULT_LAMBDA1, lambda2: DEFAULT_LAMBDA2, shots: Some(DEFAULT_SHOTS), seed: 0 }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel { lambda1: 0.0, lambda2: 0.0, shots: None, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, l) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::InvalidNoise(format!("{name} = {l} outside [0, 1]")));
            }
        }
        if self.shots == Some(0) {
            return Err(Error::InvalidNoise("shots must be positive".into()));
        }
        Ok(())
    }
}

/// Mixed state as a dense `2^n x 2^n` density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub n_qubits: usize,
    pub rho: DMatrix<C>,
}

impl DensityMatrix {
    pub fn zero(n_qubits: usize) -> Self {
        Self::from_pure(&Statevector::zero(n_qubits))
    }

    pub fn from_pure(psi: &Statevector) -> Self {
        let v = psi.to_dvector();
        DensityMatrix { n_qubits: psi.n_qubits, rho: &v * v.adjoint() }
    }

    fn left(&mut self, g: &Gate) {
        for mut col in self.rho.column_iter_mut() {
            apply_gate(col.as_mut_slice(), g);
        }
    }

    /// `ρ ↦ UρU†`
    pub fn apply(&mut self, g: &Gate) {
        self.left(g);
        self.rho = self.rho.adjoint();
        self.left(g);
        self.rho = self.rho.adjoint();
    }

    fn conjugate_pauli(&self, p: &PauliString) -> DMatrix<C> {
        // (PρP)[a, b] = ph(a')ρ[a', b'] conj(ph(b')) with a = P a'
        let d = self.rho.nrows();
        let mut out = DMatrix::zeros(d, d);
        for bp in 0..d {
            let (phb, b) = p.apply_basis(bp as u64);
            for ap in 0..d {
                let (pha, a) = p.apply_basis(ap as u64);
                out[(a as usize, b as usize)] = pha * self.rho[(ap, bp)] * phb.conj();
            }
        }
        out
    }

    /// `ρ ↦ (1-λ)ρ + λ/4^k Σ_P PρP` over all `4^k` Paulis on `qubits`
    /// (identity included). For `λ = 1` this is the completely
    /// depolarizing channel on those qubits.
    pub fn depolarize(&mut self, qubits: &[usize], lambda: f64) {
        if lambda == 0.0 {
            return;
        }
        let k = qubits.len();
        let n = 1usize << (2 * k);
        let mut acc = &self.rho * C::new(1.0 - lambda, 0.0);
        let w = C::new(lambda / n as f64, 0.0);
        for code in 0..n {
            let mut label = vec!['I'; self.n_qubits];
            for (slot, &q) in qubits.iter().enumerate() {
                label[q] = ['I', 'X', 'Y', 'Z'][(code >> (2 * slot)) & 3];
            }
            let p = PauliString::from_label(&label.into_iter().collect::<String>()).expect("valid label");
            acc += self.conjugate_pauli(&p) * w;
        }
        self.rho = acc;
    }

    pub fn trace(&self) -> C {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// `Re tr(ρP)`
    pub fn pauli_expectation(&self, p: &PauliString) -> f64 {
        (0..self.rho.nrows())
            .map(|b| {
                let (ph, nb) = p.apply_basis(b as u64);
                (self.rho[(b, nb as usize)] * ph).re
            })
            .sum()
    }

    /// Smallest eigenvalue (Hermitian part).
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.rho + self.rho.adjoint()) * C::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Anything that can report exact Pauli expectation values.
pub trait PauliExpectation {
    fn pauli_expectation(&self, p: &PauliString) -> f64;

    fn expectation(&self, sum: &PauliSum) -> f64 {
        sum.terms().map(|t| t.coeff.re * self.pauli_expectation(&t.string)).sum()
    }
}

impl PauliExpectation for Statevector {
    fn pauli_expectation(&self, p: &PauliString) -> f64 {
        let pa = apply_pauli(&self.amps, p);
        self.amps.iter().zip(pa).map(|(a, b)| a.conj() * b).sum::<C>().re
    }
}

impl PauliExpectation for DensityMatrix {
    fn pauli_expectation(&self, p: &PauliString) -> f64 {
        DensityMatrix::pauli_expectation(self, p)
    }
}

pub fn run_statevector(circuit: &Circuit) -> Statevector {
    run_statevector_from(circuit, Statevector::zero(circuit.n_qubits))
}

pub fn run_statevector_from(circuit: &Circuit, mut psi: Statevector) -> Statevector {
    for g in &circuit.gates {
        psi.apply(g);
    }
    psi
}

/// Evolve `|0...0⟩⟨0...0|` through the compiled circuit, depolarizing after
/// each gate on the qubits it touched.
pub fn run_density(circuit: &Circuit, noise: &NoiseModel) -> Result<DensityMatrix> {
    noise.validate()?;
    let mut rho = DensityMatrix::zero(circuit.n_qubits);
    for g in &circuit.compile().gates {
        rho.apply(g);
        match g {
            Gate::Cnot { control, target } => rho.depolarize(&[*control, *target], noise.lambda2),
            _ => rho.depolarize(&g.qubits(), noise.lambda1),
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msw::TrialState;
    use crate::qsim::circuit::prepare_state;

    #[test]
    fn preparation_circuits_hit_their_targets() {
        for trial in [TrialState::Heisenberg, TrialState::HeisenbergAlt, TrialState::Ionic { alpha: -0.7 }] {
            let psi = run_statevector(&prepare_state(trial));
            let target = Statevector::from_sparse(4, &trial.amplitudes());
            assert!((psi.fidelity(&target) - 1.0).abs() < 1e-14, "{trial}");
        }
    }

    #[test]
    fn compiled_pauli_exp_matches_direct() {
        let mut c = Circuit::new(4);
        for (l, a) in [("XZZY", 0.37), ("YIXI", -1.1), ("IZIZ", 0.5)] {
            c.push(Gate::PauliExp { pauli: PauliString::from_label(l).unwrap(), angle: a });
        }
        let start = run_statevector(&prepare_state(TrialState::Ionic { alpha: 0.3 }));
        let a = run_statevector_from(&c, start.clone());
        let b = run_statevector_from(&c.compile(), start);
        for (x, y) in a.amps.iter().zip(&b.amps) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn full_depolarization_gives_maximally_mixed() {
        let mut rho = DensityMatrix::from_pure(&run_statevector(&prepare_state(TrialState::Heisenberg)));
        rho.depolarize(&[0, 1, 2, 3], 1.0);
        let mixed = DMatrix::<C>::identity(16, 16) * C::new(1.0 / 16.0, 0.0);
        assert!((rho.rho - mixed).norm() < 1e-14);
    }

    #[test]
    fn noise_validation() {
        let bad = NoiseModel { lambda1: -0.1, ..NoiseModel::default() };
        assert!(matches!(run_density(&Circuit::new(1), &bad), Err(Error::InvalidNoise(_))));
        let bad = NoiseModel { shots: Some(0), ..NoiseModel::default() };
        assert!(bad.validate().is_err());
    }
}
