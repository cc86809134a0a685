use rand::Rng;

use super::estimate::rng_stream;

/// Gains `a_k = a/(k+1+A)^α`, `c_k = c/(k+1)^γ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpsaConfig {
    pub max_iter: usize,
    pub a: f64,
    pub c: f64,
    pub big_a: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Number of final iterates averaged into the reported optimum.
    pub trailing: usize,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        SpsaConfig { max_iter: 1000, a: 0.1, c: 0.1, big_a: 100.0, alpha: 0.602, gamma: 0.101, trailing: 25 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpsaTrace {
    /// θ after each update.
    pub iterates: Vec<f64>,
    pub theta_star: f64,
    pub n_evals: usize,
}

/// One-parameter SPSA. The cost receives the RNG so that shot noise draws
/// from the same reproducible stream as the perturbations.
pub fn spsa_minimize<F>(mut cost: F, theta0: f64, config: &SpsaConfig, seed: u64) -> SpsaTrace
where
    F: FnMut(f64, &mut rand_chacha::ChaCha8Rng) -> f64,
{
    let mut rng = rng_stream(seed, 0);
    let mut theta = theta0;
    let mut iterates = Vec::with_capacity(config.max_iter);
    for k in 0..config.max_iter {
        let ak = config.a / (k as f64 + 1.0 + config.big_a).powf(config.alpha);
        let ck = config.c / (k as f64 + 1.0).powf(config.gamma);
        let delta = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let fp = cost(theta + ck * delta, &mut rng);
        let fm = cost(theta - ck * delta, &mut rng);
        theta -= ak * (fp - fm) / (2.0 * ck * delta);
        iterates.push(theta);
    }
    let tail = config.trailing.clamp(1, iterates.len().max(1));
    let theta_star =
        if iterates.is_empty() { theta0 } else { iterates[iterates.len() - tail..].iter().sum::<f64>() / tail as f64 };
    SpsaTrace { iterates, theta_star, n_evals: 2 * config.max_iter }
}
