//! Seeded synthetic data.
//!
//! A 64-bit linear congruential generator with Knuth's MMIX constants:
//!
//! ```text
//! state <- state * 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! u      = (state >> 11) / 2^53                                  in [0, 1)
//! value  = 2u - 1                                                in [-1, 1)
//! ```
//!
//! The seed is the initial state. Maps are filled row-major, one draw per
//! sample, so any implementation of the recurrence reproduces the same data.

use specnet_core::{Result, SpatialMap};

const MULTIPLIER: u64 = 6364136223846793005;
const INCREMENT: u64 = 1442695040888963407;

#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_unit() - 1.0
    }

    pub fn map(&mut self, height: usize, width: usize) -> Result<SpatialMap> {
        SpatialMap::from_fn(height, width, |_, _| self.next_signed())
    }

    /// Map with samples uniform in `[0, 1)`.
    pub fn nonnegative_map(&mut self, height: usize, width: usize) -> Result<SpatialMap> {
        SpatialMap::from_fn(height, width, |_, _| self.next_unit())
    }
}
