//! Counter-based random streams.
//!
//! Trial `k` of a run seeded with `seed` draws from ChaCha8 keyed by
//! `ChaCha8Rng::seed_from_u64(seed)` on stream number `k`, starting at word
//! position 0. Each trial's draws depend only on `(seed, k)`, so results do
//! not depend on how trials are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn trial_stream(seed: u64, trial: u64) -> ChaCha8Rng {
    StreamFactory::new(seed).stream(trial)
}

/// Caches the keyed generator so per-trial streams only set the stream id.
#[derive(Debug, Clone)]
pub struct StreamFactory {
    base: ChaCha8Rng,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn stream(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(trial);
        rng.set_word_pos(0);
        rng
    }
}
