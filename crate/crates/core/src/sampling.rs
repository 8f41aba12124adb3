//! Seeded random and quasi-random sampling helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal sample via Box–Muller.
pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn normal_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| normal(rng)).collect()
}

/// Uniform sample on the unit sphere of R^len.
pub fn unit_vector<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        let v = normal_vec(rng, len);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn uniform_vec<R: Rng>(rng: &mut R, len: usize, half_width: f64) -> Vec<f64> {
    (0..len)
        .map(|_| half_width * (2.0 * rng.gen::<f64>() - 1.0))
        .collect()
}

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while index > 0 {
        out += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    out
}

/// Halton points in `[0,1)^dim` with a seeded Cranley–Patterson shift.
pub struct Halton {
    dim: usize,
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton sequence supports at most 24 dimensions");
        let mut r = rng(seed);
        let shift = (0..dim).map(|_| r.gen::<f64>()).collect();
        Halton {
            dim,
            shift,
            index: 1,
        }
    }
}

impl Iterator for Halton {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let i = self.index;
        self.index += 1;
        Some(
            (0..self.dim)
                .map(|d| (radical_inverse(i, PRIMES[d]) + self.shift[d]).fract())
                .collect(),
        )
    }
}
