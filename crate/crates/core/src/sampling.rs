//! Seeded sampling helpers shared by the estimators and oracles.
//!
//! All randomness in the crate flows through an explicitly seeded
//! [`rand_chacha::ChaCha8Rng`] passed by value or `&mut`; there is no hidden
//! global generator, so every estimate is reproducible from its seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Construct the crate's deterministic generator from a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A vector of iid standard normal entries.
pub fn standard_normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// A uniformly distributed direction on the Euclidean unit sphere.
pub fn unit_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v = standard_normal_vec(rng, n);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-30 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// A point uniform in the Euclidean ball of the given radius.
pub fn uniform_in_ball(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    let dir = unit_direction(rng, n);
    let u: f64 = rng.gen::<f64>();
    let scale = radius * u.powf(1.0 / n as f64);
    dir.into_iter().map(|x| x * scale).collect()
}

/// A radius log-uniform in `[r_max * 10^-decades, r_max]`.
pub fn log_uniform_radius(rng: &mut ChaCha8Rng, r_max: f64, decades: f64) -> f64 {
    let e: f64 = rng.gen::<f64>();
    r_max * 10f64.powf(-decades * e)
}
