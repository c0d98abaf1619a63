//! Seeded random streams.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Master seed of a stochastic run. Identical seeds give bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Generator for the whole run.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream `index` derived from this seed.
    ///
    /// Streams do not overlap, so work split across threads by index
    /// reproduces the serial result regardless of scheduling.
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }

    /// Child seed for sub-experiment `index`, e.g. one point of a parameter sweep.
    pub fn derive(self, index: u64) -> RngSeed {
        RngSeed(self.stream(index).next_u64())
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}
