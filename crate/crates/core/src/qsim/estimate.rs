use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::pauli::PauliSum;
use super::sim::PauliExpectation;

/// Independent random stream `k` derived from a master seed.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Expectation of a Hermitian Pauli sum. With `shots = None` the exact value
/// is returned. Otherwise each non-identity term is measured with `shots`
/// samples: the `+1` count is binomial with `p = (1 + ⟨P⟩)/2`.
pub fn estimate_expectation<S: PauliExpectation + ?Sized, R: Rng + ?Sized>(
    state: &S,
    sum: &PauliSum,
    shots: Option<u64>,
    rng: &mut R,
) -> f64 {
    let Some(n) = shots else { return state.expectation(sum) };
    let mut total = 0.0;
    for term in sum.terms() {
        debug_assert!(term.coeff.im.abs() < 1e-12, "non-Hermitian sum");
        if term.string.is_identity() {
            total += term.coeff.re;
            continue;
        }
        let e = state.pauli_expectation(&term.string).clamp(-1.0, 1.0);
        let p = (1.0 + e) / 2.0;
        let k = Binomial::new(n, p).expect("p in [0, 1]").sample(rng) as f64;
        total += term.coeff.re * (2.0 * k / n as f64 - 1.0);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::pauli::PauliString;
    use crate::qsim::sim::Statevector;
    use num_complex::Complex64;

    #[test]
    fn shot_estimate_converges() {
        let psi = Statevector::from_real(1, &[0.8, 0.6]).unwrap();
        let z = PauliSum::from_terms(1, [(PauliString::from_label("Z").unwrap(), Complex64::new(1.0, 0.0))]);
        let exact = psi.expectation(&z);
        assert!((exact - 0.28).abs() < 1e-15);
        let mut rng = rng_stream(7, 0);
        let est = estimate_expectation(&psi, &z, Some(1_000_000), &mut rng);
        assert!((est - exact).abs() < 5e-3);
        assert_eq!(estimate_expectation(&psi, &z, None, &mut rng), exact);
    }
}
