//! Deterministic, splittable random streams.
//!
//! Ensemble simulation demands per-path generators that are reproducible and
//! provably non-overlapping regardless of how paths are scheduled across
//! workers. [`SubstreamRng`] is a counter-based generator (Philox-2x64, 10
//! rounds): every output word is a keyed bijective mix of the 128-bit input
//! block `(block counter, stream index)`, so two generators with different
//! stream indices can never visit the same input block. The master seed is
//! the Philox key.

use crate::fmath;

/// Source of raw 64-bit randomness plus the derived draws the samplers need.
///
/// All draws are deterministic functions of the underlying `next_u64`
/// sequence, so any two `RandomSource` implementations producing the same
/// word stream produce identical simulations.
pub trait RandomSource {
    fn next_u64(&mut self) -> u64;

    /// Uniform in `[0, 1)` with 53-bit resolution.
    #[inline]
    fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform in `(0, 1]`; never returns zero, so `ln` below is always finite.
    #[inline]
    fn uniform_open(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.next_u64() >> 11) + 1) as f64 * SCALE
    }

    /// Inverse-CDF exponential draw with the given rate.
    #[inline]
    fn exponential(&mut self, rate: f64) -> f64 {
        -fmath::ln(self.uniform_open()) / rate
    }

    /// Returns `true` with probability `p`.
    #[inline]
    fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

const PHILOX_M: u64 = 0xD2B7_4407_B1CE_6E93;
const PHILOX_W: u64 = 0x9E37_79B9_7F4A_7C15;

/// One keyed 128-bit -> 128-bit Philox-2x64 block permutation, 10 rounds.
#[inline]
fn philox2x64_10(counter: u64, stream: u64, key: u64) -> [u64; 2] {
    let mut x0 = counter;
    let mut x1 = stream;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k = k.wrapping_add(PHILOX_W);
        }
        let prod = (x0 as u128) * (PHILOX_M as u128);
        let hi = (prod >> 64) as u64;
        let lo = prod as u64;
        x0 = hi ^ k ^ x1;
        x1 = lo;
    }
    [x0, x1]
}

/// Counter-based generator for one stream of a keyed family.
///
/// `SubstreamRng::new(seed, i)` and `SubstreamRng::new(seed, j)` with
/// `i != j` consume disjoint counter blocks by construction, which is what
/// makes ensemble runs both parallelizable and bit-reproducible.
#[derive(Debug, Clone)]
pub struct SubstreamRng {
    key: u64,
    stream: u64,
    block: u64,
    spare: Option<u64>,
}

impl SubstreamRng {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        Self {
            key: master_seed,
            stream,
            block: 0,
            spare: None,
        }
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RandomSource for SubstreamRng {
    #[inline]
    fn next_u64(&mut self) -> u64 {
        if let Some(word) = self.spare.take() {
            return word;
        }
        let out = philox2x64_10(self.block, self.stream, self.key);
        self.block = self.block.wrapping_add(1);
        self.spare = Some(out[1]);
        out[0]
    }
}
