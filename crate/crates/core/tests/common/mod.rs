#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction times a radius drawn from `[0, rmax)`.
pub fn ball_point(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> Vec<f64> {
    let v = direction(rng, n);
    let r = rmax * rng.gen::<f64>();
    v.into_iter().map(|x| x * r).collect()
}

pub fn direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s > 0.1 && s <= 1.0 {
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}
