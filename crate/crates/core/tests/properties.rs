use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use mswt::fock::{
    block_split, build_basis, build_hubbard, exact_eigensolve, heisenberg_projector, Basis, FermionOperator,
    HubbardParams, Ladder,
};
use mswt::linalg::{expm, sym_eigen_sorted};
use mswt::msw::{
    cost_coupling, cost_energy, fit_channels, iterate_sw, minimize_theta, DimerModel, TrialState, DEFAULT_BRACKET,
    DEFAULT_TOL,
};
use mswt::qsim::{
    estimate_expectation, jordan_wigner, rng_stream, run_statevector_from, trotter_circuit, Circuit, DensityMatrix,
    Gate, PauliExpectation, PauliString, PauliSum, Statevector,
};
use mswt::recursion::{integrals_order, nested_commutator_series, reconstruct};
use mswt::swgen::{build_generator, denominators, sw_lambdas};

fn nonresonant(p: &HubbardParams) -> bool {
    denominators(p, 0, 1).iter().chain(&denominators(p, 1, 0)).all(|d| d.abs() > 0.5)
}

prop_compose! {
    fn dimer_params()(dmu in -3.0..3.0f64, u0 in 0.5..20.0f64, u1 in 0.5..20.0f64, t in 0.5..1.5f64) -> HubbardParams {
        HubbardParams::dimer(t, [dmu / 2.0, -dmu / 2.0], [u0, u1])
    }
}

fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    sym_eigen_sorted(m).into_iter().map(|p| p.0).collect()
}

fn pauli_label(n: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n).prop_map(|v| v.into_iter().collect())
}

fn ladder(n_orb: usize) -> impl Strategy<Value = Ladder> {
    (0..n_orb, 0..4u8).prop_map(|(p, k)| match k {
        0 => Ladder::Create(p),
        1 => Ladder::Annihilate(p),
        2 => Ladder::Number(p),
        _ => Ladder::Hole(p),
    })
}

fn fermion_operator() -> impl Strategy<Value = FermionOperator> {
    prop::collection::vec((-2.0..2.0f64, prop::collection::vec(ladder(4), 0..5)), 1..6).prop_map(|terms| {
        let mut op = FermionOperator::zero(4);
        for (c, ops) in terms {
            op.push(c, ops);
        }
        op
    })
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projector_is_idempotent_and_split_is_exact(n in prop::sample::select(vec![2usize, 4]), u in 0.5..20.0f64) {
        let basis = Arc::new(build_basis(n, n / 2, n / 2).unwrap());
        let (h0, v) = build_hubbard(&HubbardParams::ring(n, 1.0, u), &basis).unwrap();
        let p = heisenberg_projector(&basis).unwrap();
        let pd = p.to_dense();
        prop_assert!((&pd * &pd - &pd).norm() < 1e-14);
        let h = h0.with_dense(h0.to_dense() + v.to_dense());
        let (d, x) = block_split(&h, &p).unwrap();
        prop_assert!((d.to_dense() + x.to_dense() - h.to_dense()).norm() < 1e-13);
        let q = DMatrix::identity(basis.dim(), basis.dim()) - &pd;
        prop_assert!((&pd * d.to_dense() * &q).norm() < 1e-14);
    }

    #[test]
    fn generator_is_antisymmetric_and_rotation_preserves_spectrum(p in dimer_params(), theta in -1.5..1.5f64) {
        let basis = Arc::new(Basis::full(2).unwrap());
        let table = sw_lambdas(&p).unwrap();
        let s = build_generator(&table, &basis).unwrap().to_dense();
        prop_assert!((&s + s.transpose()).norm() < 1e-14);
        let (h0, v) = build_hubbard(&p, &basis).unwrap();
        let h = h0.to_dense() + v.to_dense();
        let u = expm(&(&s * theta));
        prop_assert!((u.transpose() * &u - DMatrix::identity(16, 16)).norm() < 1e-10);
        let rotated = &u * &h * u.transpose();
        for (a, b) in eigenvalues(&rotated).iter().zip(eigenvalues(&h)) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn recursion_matches_commutators(p in dimer_params()) {
        prop_assume!(nonresonant(&p));
        let basis = Arc::new(Basis::full(2).unwrap());
        let table = sw_lambdas(&p).unwrap();
        let (_, v) = build_hubbard(&p, &basis).unwrap();
        let s = build_generator(&table, &basis).unwrap();
        let series = nested_commutator_series(&s, &v, 6).unwrap();
        for (k, reference) in series.iter().enumerate() {
            let r = reconstruct(&integrals_order(&table, k), &basis).unwrap().to_dense();
            let reference = reference.to_dense();
            prop_assert!((r - &reference).norm() <= 1e-10 * reference.norm().max(1.0), "depth {}", k);
        }
    }

    #[test]
    fn jordan_wigner_is_faithful(op in fermion_operator()) {
        let basis = Arc::new(Basis::full(2).unwrap());
        let fock = op.matrix(&basis, mswt::Exec::Sequential).unwrap().to_dense();
        let qubit = jordan_wigner(&op, 4).unwrap().matrix();
        prop_assert!((qubit - to_complex(&fock)).norm() < 1e-12);
    }

    #[test]
    fn commuting_trotter_is_exact(labels in prop::collection::vec(pauli_label(4), 1..6), coeffs in prop::collection::vec(-1.0..1.0f64, 6), theta in -2.0..2.0f64) {
        // Z/I-only strings all commute.
        let mut sum = PauliSum::zero(4);
        for (l, c) in labels.iter().zip(&coeffs) {
            let zl: String = l.chars().map(|ch| if ch == 'I' { 'I' } else { 'Z' }).collect();
            sum.add_term(PauliString::from_label(&zl).unwrap(), Complex64::new(0.0, *c));
        }
        sum.simplify();
        prop_assert!(sum.all_commute());
        let circuit = trotter_circuit(&sum, theta).unwrap();
        let start = Statevector::from_real(4, &(0..16).map(|k| ((k * 7 % 5) as f64) - 2.0).collect::<Vec<_>>()).unwrap();
        let norm = start.norm();
        let start = Statevector { n_qubits: 4, amps: start.amps.iter().map(|a| a / norm).collect() };
        let got = run_statevector_from(&circuit.compile(), start.clone());
        let exact = (sum.matrix() * Complex64::new(theta, 0.0)).exp() * start.to_dvector();
        for (a, b) in got.amps.iter().zip(exact.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn cnot_ladder_cost(label in pauli_label(5), angle in -3.0..3.0f64) {
        let p = PauliString::from_label(&label).unwrap();
        let mut c = Circuit::new(5);
        c.push(Gate::PauliExp { pauli: p, angle });
        let expected = if p.weight() == 0 { 0 } else { 2 * (p.weight() - 1) };
        prop_assert_eq!(c.gate_counts().cnot, expected);
    }

    #[test]
    fn depolarizing_channel_is_cptp(lambda in 0.0..=1.0f64, two in any::<bool>()) {
        // Choi matrix of the channel on the first k qubits of a k-qubit system.
        let k = if two { 2 } else { 1 };
        let d = 1usize << k;
        let mut choi = DMatrix::<Complex64>::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut rho = DensityMatrix { n_qubits: k, rho: DMatrix::zeros(d, d) };
                rho.rho[(i, j)] = Complex64::new(1.0, 0.0);
                let qubits: Vec<usize> = (0..k).collect();
                rho.depolarize(&qubits, lambda);
                let tr = rho.trace();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((tr - Complex64::new(want, 0.0)).norm() < 1e-14);
                for a in 0..d {
                    for b in 0..d {
                        choi[(i * d + a, j * d + b)] = rho.rho[(a, b)];
                    }
                }
            }
        }
        let min = choi.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= -1e-10);
    }

    #[test]
    fn infinite_shots_is_the_trace(label in pauli_label(3), seed in any::<u64>(), lambda in 0.0..0.5f64) {
        let mut psi = Statevector::zero(3);
        for g in [Gate::H(0), Gate::RY(1, 0.7), Gate::Cnot { control: 0, target: 2 }, Gate::RZ(2, 1.1)] {
            psi.apply(&g);
        }
        let mut rho = DensityMatrix::from_pure(&psi);
        rho.depolarize(&[0, 2], lambda);
        let p = PauliString::from_label(&label).unwrap();
        let sum = PauliSum::from_terms(3, [(p, Complex64::new(0.8, 0.0))]);
        let trace = (&rho.rho * p.matrix()).trace().re * 0.8;
        let mut rng = rng_stream(seed, 0);
        prop_assert!((estimate_expectation(&rho, &sum, None, &mut rng) - trace).abs() < 1e-12);
        prop_assert!((rho.expectation(&sum) - trace).abs() < 1e-12);
    }

    #[test]
    fn variational_dominance(p in dimer_params()) {
        prop_assume!(nonresonant(&p));
        let model = DimerModel::new(p).unwrap();
        let cost = cost_energy(&model, TrialState::Heisenberg).unwrap();
        let best = minimize_theta(&cost, DEFAULT_BRACKET, DEFAULT_TOL).unwrap();
        let theta_x = minimize_theta(&cost_coupling(&model), DEFAULT_BRACKET, DEFAULT_TOL).unwrap().theta_star;
        prop_assert!(best.value <= cost.eval(theta_x) + 1e-12);
        prop_assert!(best.value <= cost.eval(1.0) + 1e-12);
        let e0 = exact_eigensolve(&model.h, 1).unwrap()[0].0;
        prop_assert!(best.value >= e0 - 1e-12);
    }

    #[test]
    fn iterated_singlet_energy_is_four_j(u in 3.0..30.0f64) {
        // Once the coupling is gone the covalent singlet energy is carried by
        // the exchange coefficient alone: E_singlet = 4 J_op, with the
        // S_z = 0 triplet pinned at zero.
        let trace = iterate_sw(&HubbardParams::homogeneous_dimer(1.0, u), 6, 1e-13).unwrap();
        prop_assert!(trace.converged);
        let model = DimerModel::new(HubbardParams::homogeneous_dimer(1.0, u)).unwrap();
        let hb = &trace.last().hbar;
        let fit = fit_channels(&model, hb).unwrap();
        let singlet = hb.expectation(&model.trial(TrialState::Heisenberg));
        let triplet = hb.expectation(&model.trial(TrialState::HeisenbergAlt));
        prop_assert!((singlet - 4.0 * fit.j).abs() < 1e-10, "{} vs {}", singlet, 4.0 * fit.j);
        prop_assert!(triplet.abs() < 1e-10);
        let e0 = exact_eigensolve(&model.h, 1).unwrap()[0].0;
        prop_assert!((singlet - e0).abs() < 1e-10);
    }
}
