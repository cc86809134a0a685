use std::f64::consts::FRAC_PI_2;
use std::fmt;

use super::pauli::{PauliString, PauliSum};
use crate::error::{Error, Result};
use crate::msw::TrialState;

/// Gate set. Rotations follow `R_a(φ) = exp(-iφ a/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    RY(usize, f64),
    RZ(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
    /// `exp(-i φ/2 P)`
    PauliExp {
        pauli: PauliString,
        angle: f64,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::RY(q, _) | Gate::RZ(q, _) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::PauliExp { pauli, .. } => pauli.support(),
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::RY(q, a) => Gate::RY(q, -a),
            Gate::RZ(q, a) => Gate::RZ(q, -a),
            Gate::PauliExp { pauli, angle } => Gate::PauliExp { pauli, angle: -angle },
            g => g,
        }
    }

    fn cancels(&self, other: &Gate) -> bool {
        const TOL: f64 = 1e-12;
        match (*self, *other) {
            (Gate::H(a), Gate::H(b)) | (Gate::X(a), Gate::X(b)) => a == b,
            (Gate::RY(a, x), Gate::RY(b, y)) | (Gate::RZ(a, x), Gate::RZ(b, y)) => a == b && (x + y).abs() < TOL,
            (Gate::Cnot { control: c1, target: t1 }, Gate::Cnot { control: c2, target: t2 }) => c1 == c2 && t1 == t2,
            (Gate::PauliExp { pauli: p, angle: x }, Gate::PauliExp { pauli: q, angle: y }) => {
                p == q && (x + y).abs() < TOL
            }
            _ => false,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(q) => write!(f, "h q{q}"),
            Gate::X(q) => write!(f, "x q{q}"),
            Gate::RY(q, a) => write!(f, "ry({a}) q{q}"),
            Gate::RZ(q, a) => write!(f, "rz({a}) q{q}"),
            Gate::Cnot { control, target } => write!(f, "cx q{control},q{target}"),
            Gate::PauliExp { pauli, angle } => write!(f, "pauliexp({angle}) {pauli}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub one_qubit: usize,
    pub cnot: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.one_qubit + self.cnot
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) -> &mut Self {
        debug_assert!(g.qubits().iter().all(|&q| q < self.n_qubits));
        self.gates.push(g);
        self
    }

    pub fn extend(&mut self, other: &Circuit) -> &mut Self {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.gates.extend_from_slice(&other.gates);
        self
    }

    pub fn inverse(&self) -> Circuit {
        Circuit { n_qubits: self.n_qubits, gates: self.gates.iter().rev().map(Gate::inverse).collect() }
    }

    /// Expand every `PauliExp` into basis changes, a CNOT ladder and one `RZ`.
    /// A string of weight `w` costs `2(w-1)` CNOTs. Identity strings only
    /// contribute a global phase and are dropped.
    pub fn compile(&self) -> Circuit {
        let mut out = Circuit::new(self.n_qubits);
        for g in &self.gates {
            let Gate::PauliExp { pauli, angle } = *g else {
                out.gates.push(*g);
                continue;
            };
            let support = pauli.support();
            let Some(&last) = support.last() else { continue };
            for &q in &support {
                match pauli.letter(q) {
                    'X' => out.gates.push(Gate::H(q)),
                    'Y' => out.gates.extend([Gate::RZ(q, -FRAC_PI_2), Gate::H(q)]),
                    _ => {}
                }
            }
            for w in support.windows(2) {
                out.gates.push(Gate::Cnot { control: w[0], target: w[1] });
            }
            out.gates.push(Gate::RZ(last, angle));
            for w in support.windows(2).rev() {
                out.gates.push(Gate::Cnot { control: w[0], target: w[1] });
            }
            for &q in support.iter().rev() {
                match pauli.letter(q) {
                    'X' => out.gates.push(Gate::H(q)),
                    'Y' => out.gates.extend([Gate::H(q), Gate::RZ(q, FRAC_PI_2)]),
                    _ => {}
                }
            }
        }
        out
    }

    /// Cancel adjacent inverse pairs (gates with nothing acting on their
    /// qubits in between), repeatedly.
    pub fn optimize(&self) -> Circuit {
        let mut out: Vec<Gate> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let qs = g.qubits();
            let blocker = out.iter().rposition(|h| h.qubits().iter().any(|q| qs.contains(q)));
            match blocker {
                Some(k) if out[k].cancels(g) && out[k].qubits() == qs => {
                    out.remove(k);
                }
                _ => out.push(*g),
            }
        }
        Circuit { n_qubits: self.n_qubits, gates: out }
    }

    /// Counts after compilation.
    pub fn gate_counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for g in &self.compile().gates {
            match g {
                Gate::Cnot { .. } => c.cnot += 1,
                _ => c.one_qubit += 1,
            }
        }
        c
    }

    pub fn depth(&self) -> usize {
        let mut layer = vec![0usize; self.n_qubits];
        for g in &self.compile().gates {
            let qs = g.qubits();
            let d = qs.iter().map(|&q| layer[q]).max().unwrap_or(0) + 1;
            for q in qs {
                layer[q] = d;
            }
        }
        layer.into_iter().max().unwrap_or(0)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// First-order Trotter product `Π_k exp(θ c_k P_k)` over the terms of an
/// anti-Hermitian sum, in lexicographic order. Each coefficient must be
/// imaginary, `c_k = iξ_k`, giving `PauliExp(P_k, -2θξ_k)`.
pub fn trotter_circuit(sum: &PauliSum, theta: f64) -> Result<Circuit> {
    const TOL: f64 = 1e-12;
    let mut c = Circuit::new(sum.n_qubits());
    for term in sum.terms() {
        if term.coeff.re.abs() > TOL {
            return Err(Error::NonUnitaryFactor(format!("{} has real part {:e}", term.string, term.coeff.re)));
        }
        if term.string.is_identity() {
            continue;
        }
        c.push(Gate::PauliExp { pauli: term.string, angle: -2.0 * theta * term.coeff.im });
    }
    Ok(c)
}

/// Four-qubit preparation circuit for a dimer trial state.
pub fn prepare_state(trial: TrialState) -> Circuit {
    let mut c = Circuit::new(4);
    match trial {
        // Up to a global sign.
        TrialState::Heisenberg | TrialState::HeisenbergAlt => {
            if trial == TrialState::Heisenberg {
                c.push(Gate::X(0));
            }
            c.push(Gate::H(0))
                .push(Gate::Cnot { control: 0, target: 3 })
                .push(Gate::Cnot { control: 0, target: 1 })
                .push(Gate::X(1))
                .push(Gate::Cnot { control: 0, target: 2 })
                .push(Gate::X(2));
        }
        TrialState::Ionic { alpha } => {
            c.push(Gate::RY(2, 2.0 * alpha))
                .push(Gate::Cnot { control: 2, target: 3 })
                .push(Gate::Cnot { control: 2, target: 0 })
                .push(Gate::X(0))
                .push(Gate::Cnot { control: 2, target: 1 })
                .push(Gate::X(1));
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cnot_count_is_twice_weight_minus_one() {
        for label in ["ZIII", "XYII", "XZZY", "IYZX"] {
            let p = PauliString::from_label(label).unwrap();
            let mut c = Circuit::new(4);
            c.push(Gate::PauliExp { pauli: p, angle: 0.3 });
            assert_eq!(c.gate_counts().cnot, 2 * (p.weight() - 1));
        }
    }

    #[test]
    fn optimize_cancels_inverse_pairs() {
        let mut c = Circuit::new(2);
        c.push(Gate::H(0))
            .push(Gate::Cnot { control: 0, target: 1 })
            .push(Gate::Cnot { control: 0, target: 1 })
            .push(Gate::H(0));
        c.push(Gate::RZ(1, 0.2)).push(Gate::X(0)).push(Gate::RZ(1, -0.2));
        let o = c.optimize();
        assert_eq!(o.gates, vec![Gate::X(0)]);
        let mut keep = Circuit::new(2);
        keep.push(Gate::Cnot { control: 0, target: 1 }).push(Gate::Cnot { control: 1, target: 0 });
        assert_eq!(keep.optimize().gates.len(), 2);
    }
}
