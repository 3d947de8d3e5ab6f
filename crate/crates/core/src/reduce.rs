//! Deterministic seeding and order-independent accumulation.
//!
//! Parallel runs split work into fixed-size chunks whose random streams are
//! derived from `(seed, cell, chunk)`, never from the worker that happens to
//! process them. Sums are accumulated in 64.64 fixed point, which makes
//! addition associative, so partial results can be merged in any order and
//! still agree bit for bit.

use std::ops::{Add, AddAssign};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `parts` into `seed`. Different part lists give unrelated seeds.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p.wrapping_add(GOLDEN))))
}

pub fn rng_for(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, parts))
}

const SCALE: f64 = 18_446_744_073_709_551_616.0; // 2^64

/// Exact sum of `f64` values on a 2^-64 grid.
///
/// Inputs are rounded toward zero to a multiple of 2^-64, and magnitudes must
/// stay below about 2^40 per value to leave headroom for 2^23 terms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ExactSum(i128);

impl ExactSum {
    pub fn new() -> Self {
        Self(0)
    }

    pub fn push(&mut self, value: f64) {
        debug_assert!(value.is_finite());
        self.0 += (value * SCALE) as i128;
    }

    pub fn value(self) -> f64 {
        // split to keep both halves exactly representable
        let hi = (self.0 >> 64) as f64;
        let lo = (self.0 as u64) as f64 / SCALE;
        hi + lo
    }

    /// `sum / count`, or NaN when `count == 0`.
    pub fn mean(self, count: u64) -> f64 {
        if count == 0 {
            f64::NAN
        } else {
            self.value() / count as f64
        }
    }
}

impl Add for ExactSum {
    type Output = ExactSum;
    fn add(self, rhs: Self) -> Self {
        ExactSum(self.0 + rhs.0)
    }
}

impl AddAssign for ExactSum {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}
