//! Counter-based random streams.
//!
//! Every draw is a pure function of `(seed, shot, point, spin)`: the four
//! counters form the 256-bit ChaCha key, so results do not depend on the order
//! in which shots are evaluated or on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Indices identifying one random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub shot: u64,
    pub point: u64,
    pub spin: u64,
}

impl StreamKey {
    pub fn new(seed: u64, shot: u64, point: u64, spin: u64) -> Self {
        Self { seed, shot, point, spin }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        for (chunk, word) in key
            .chunks_exact_mut(8)
            .zip([self.seed, self.shot, self.point, self.spin])
        {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }

    pub fn standard_normal(&self) -> f64 {
        self.rng().sample(StandardNormal)
    }
}
