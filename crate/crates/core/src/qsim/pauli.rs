use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FermionOperator, Ladder};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tensor product of single-qubit Paulis, stored as X/Z bit masks
/// (`Y` sets both bits). Qubit `q` is bit `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= 64);
        PauliString { n_qubits, x: 0, z: 0 }
    }

    /// Parse a label such as `"XZYZ"` (qubit 0 first).
    pub fn from_label(label: &str) -> Result<Self> {
        let mut p = PauliString::identity(label.chars().count());
        for (q, c) in label.chars().enumerate() {
            match c {
                'I' => {}
                'X' => p.x |= 1 << q,
                'Y' => {
                    p.x |= 1 << q;
                    p.z |= 1 << q;
                }
                'Z' => p.z |= 1 << q,
                other => return Err(Error::InvalidParams(format!("bad Pauli letter {other:?}"))),
            }
        }
        Ok(p)
    }

    pub fn single(n_qubits: usize, q: usize, letter: char) -> Self {
        let mut label = vec!['I'; n_qubits];
        label[q] = letter;
        Self::from_label(&label.into_iter().collect::<String>()).expect("valid letter")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn label(&self) -> String {
        (0..self.n_qubits).map(|q| self.letter(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&q| (self.x | self.z) >> q & 1 == 1).collect()
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// `P|b⟩ = phase |b ^ x⟩`
    #[inline]
    pub fn apply_basis(&self, b: u64) -> (Complex64, u64) {
        let ny = (self.x & self.z).count_ones();
        let mut ph = match ny % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => I,
            2 => Complex64::new(-1.0, 0.0),
            _ => -I,
        };
        if (b & self.z).count_ones() % 2 == 1 {
            ph = -ph;
        }
        (ph, b ^ self.x)
    }

    /// `self * other = phase * product`
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        assert_eq!(self.n_qubits, other.n_qubits);
        let mut power = 0u32;
        for q in 0..self.n_qubits {
            power += match (self.letter(q), other.letter(q)) {
                ('X', 'Y') | ('Y', 'Z') | ('Z', 'X') => 1,
                ('Y', 'X') | ('Z', 'Y') | ('X', 'Z') => 3,
                _ => 0,
            };
        }
        let phase = [Complex64::new(1.0, 0.0), I, Complex64::new(-1.0, 0.0), -I][(power % 4) as usize];
        (phase, PauliString { n_qubits: self.n_qubits, x: self.x ^ other.x, z: self.z ^ other.z })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let d = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(d, d);
        for b in 0..d as u64 {
            let (ph, nb) = self.apply_basis(b);
            m[(nb as usize, b as usize)] = ph;
        }
        m
    }

    fn letter_rank(&self, q: usize) -> u8 {
        match self.letter(q) {
            'I' => 0,
            'X' => 1,
            'Y' => 2,
            _ => 3,
        }
    }
}

/// Lexicographic by label, qubit 0 most significant, `I < X < Y < Z`.
impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n_qubits.cmp(&other.n_qubits).then_with(|| {
            (0..self.n_qubits)
                .map(|q| self.letter_rank(q).cmp(&other.letter_rank(q)))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Weighted Pauli string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coeff: Complex64,
}

/// Linear combination of Pauli strings, kept in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

pub const PAULI_DROP_TOL: f64 = 1e-14;

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: BTreeMap::new() }
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (PauliString, Complex64)>) -> Self {
        let mut s = PauliSum::zero(n_qubits);
        for (p, c) in terms {
            s.add_term(p, c);
        }
        s.simplify();
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn add_term(&mut self, p: PauliString, c: Complex64) {
        assert_eq!(p.n_qubits(), self.n_qubits);
        *self.terms.entry(p).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn add(&mut self, other: &PauliSum) {
        for (p, c) in &other.terms {
            self.add_term(*p, *c);
        }
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in self.terms.values_mut() {
            *v *= c;
        }
    }

    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::zero(self.n_qubits);
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                let (ph, r) = p.mul(q);
                out.add_term(r, ph * a * b);
            }
        }
        out
    }

    /// Drop terms below [`PAULI_DROP_TOL`].
    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() > PAULI_DROP_TOL);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(p, c)| PauliTerm { string: *p, coeff: *c })
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let d = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(d, d);
        for (p, c) in &self.terms {
            for b in 0..d as u64 {
                let (ph, nb) = p.apply_basis(b);
                m[(nb as usize, b as usize)] += ph * c;
            }
        }
        m
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.re.abs() <= tol)
    }

    pub fn all_commute(&self) -> bool {
        let ps: Vec<_> = self.terms.keys().collect();
        ps.iter().enumerate().all(|(i, a)| ps[i + 1..].iter().all(|b| a.commutes_with(b)))
    }
}

fn jw_ladder(op: Ladder, n: usize) -> PauliSum {
    let half = Complex64::new(0.5, 0.0);
    let p = op.orbital();
    let chain = |letter: char| {
        let mut label: Vec<char> = vec!['I'; n];
        for l in label.iter_mut().take(p) {
            *l = 'Z';
        }
        label[p] = letter;
        PauliString::from_label(&label.into_iter().collect::<String>()).expect("valid label")
    };
    match op {
        Ladder::Create(_) => PauliSum::from_terms(n, [(chain('X'), half), (chain('Y'), -half * I)]),
        Ladder::Annihilate(_) => PauliSum::from_terms(n, [(chain('X'), half), (chain('Y'), half * I)]),
        Ladder::Number(_) => {
            PauliSum::from_terms(n, [(PauliString::identity(n), half), (PauliString::single(n, p, 'Z'), -half)])
        }
        Ladder::Hole(_) => {
            PauliSum::from_terms(n, [(PauliString::identity(n), half), (PauliString::single(n, p, 'Z'), half)])
        }
    }
}

/// Jordan-Wigner image with qubit `q` = orbital `q`:
/// `c†_p = Z_0 ... Z_{p-1} (X_p - iY_p)/2`.
pub fn jordan_wigner(op: &FermionOperator, n_qubits: usize) -> Result<PauliSum> {
    let mut out = PauliSum::zero(n_qubits);
    for term in &op.terms {
        let mut acc =
            PauliSum::from_terms(n_qubits, [(PauliString::identity(n_qubits), Complex64::new(term.coeff, 0.0))]);
        for &l in &term.ops {
            if l.orbital() >= n_qubits {
                return Err(Error::OrbitalOutOfRange { orbital: l.orbital(), n_orbitals: n_qubits });
            }
            acc = acc.mul(&jw_ladder(l, n_qubits));
        }
        out.add(&acc);
    }
    out.simplify();
    Ok(out)
}
