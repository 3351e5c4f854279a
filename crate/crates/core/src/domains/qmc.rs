//! Randomly shifted Halton points for volume estimates with an error bar.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const DEFAULT_SEED: u64 = 0x5EED;
static SEED: AtomicU64 = AtomicU64::new(DEFAULT_SEED);
pub const DEFAULT_SAMPLES: usize = 1 << 16;
const SHIFTS: usize = 16;
const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Seed used by volume estimates that do not take one explicitly.
pub fn seed() -> u64 {
    SEED.load(Ordering::Relaxed)
}

pub fn set_seed(seed: u64) {
    SEED.store(seed, Ordering::Relaxed);
}

/// Halton point `i` in `[0,1)^m` (index 0 is skipped).
pub fn halton(i: u64, m: usize) -> Vec<f64> {
    (0..m).map(|k| radical_inverse(i + 1, PRIMES[k % PRIMES.len()])).collect()
}

/// Estimates the measure of `{z ∈ [−h,h]^m : inside(z)}`. Independent
/// Cranley–Patterson shifts give the standard error.
pub fn estimate(
    m: usize,
    half_width: f64,
    samples: usize,
    seed: u64,
    inside: impl Fn(&[f64]) -> bool + Sync,
) -> (f64, f64) {
    if m == 0 {
        return (if inside(&[]) { 1.0 } else { 0.0 }, 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<Vec<f64>> = (0..SHIFTS).map(|_| (0..m).map(|_| rng.gen::<f64>()).collect()).collect();
    let per = (samples / SHIFTS).max(1);
    let cube = (2.0 * half_width).powi(m as i32);
    let estimates: Vec<f64> = shifts
        .par_iter()
        .map(|shift| {
            let mut hits = 0usize;
            let mut z = vec![0.0; m];
            for i in 0..per {
                let u = halton(i as u64, m);
                for k in 0..m {
                    let x = (u[k] + shift[k]).fract();
                    z[k] = (2.0 * x - 1.0) * half_width;
                }
                if inside(&z) {
                    hits += 1;
                }
            }
            cube * hits as f64 / per as f64
        })
        .collect();
    let mean = estimates.iter().sum::<f64>() / SHIFTS as f64;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (SHIFTS - 1) as f64;
    (mean, (var / SHIFTS as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_area() {
        let (v, se) = estimate(2, 1.0, DEFAULT_SAMPLES, DEFAULT_SEED, |z| z[0] * z[0] + z[1] * z[1] < 1.0);
        assert!((v - std::f64::consts::PI).abs() < 4.0 * se.max(1e-3), "{v} ± {se}");
        assert!(se < 0.01);
    }

    #[test]
    fn halton_is_in_unit_cube() {
        for i in 0..100 {
            assert!(halton(i, 3).iter().all(|&x| (0.0..1.0).contains(&x)));
        }
        assert_eq!(halton(0, 2), vec![0.5, 1.0 / 3.0]);
    }
}
