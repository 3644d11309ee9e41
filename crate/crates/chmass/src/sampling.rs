//! Seeded random inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A generator for one named sweep; different sweeps draw independent streams
/// from the same seed.
pub fn stream(seed: u64, sweep: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(sweep);
    r
}

pub fn direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s > 0.1 && s <= 1.0 {
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Uniform in the Euclidean ball of radius `rmax`.
pub fn ball_point(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> Vec<f64> {
    let d = direction(rng, n);
    let r = rmax * rng.gen::<f64>().powf(1.0 / n as f64);
    d.into_iter().map(|x| x * r).collect()
}
