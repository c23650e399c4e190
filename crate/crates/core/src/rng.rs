//! Counter-based uniform draws.
//!
//! Every draw is a pure function of `(seed, index, counter)`, so a sample
//! can be regenerated independently of how the work was split across
//! threads.

use serde::{Deserialize, Serialize};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const INDEX_KEY: u64 = 0xD1B5_4A32_D192_ED03;
const COUNTER_KEY: u64 = 0xABC9_8388_FB8F_AC03;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomStream {
    seed: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Raw 64-bit output for substream `index`, draw number `counter`.
    #[inline]
    pub fn bits(&self, index: u64, counter: u64) -> u64 {
        let mut h = mix64(self.seed.wrapping_add(GOLDEN));
        h = mix64(h ^ index.wrapping_mul(INDEX_KEY).wrapping_add(GOLDEN));
        mix64(h ^ counter.wrapping_mul(COUNTER_KEY).wrapping_add(GOLDEN))
    }

    /// Uniform draw in the open interval (0, 1); 0 and 1 are never produced.
    #[inline]
    pub fn uniform(&self, index: u64, counter: u64) -> f64 {
        // 52 bits keep the largest value (1 - 2^-53) exactly representable.
        ((self.bits(index, counter) >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
    }
}
