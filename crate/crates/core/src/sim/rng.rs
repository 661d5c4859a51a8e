//! Reproducible random streams keyed by `(seed, stream, replica)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Words of keystream reserved per replica (2^36 32-bit words).
const REPLICA_SHIFT: u32 = 36;

/// Master seed plus stream id. Replica `r` reads its own disjoint block of
/// the ChaCha keystream, so replicas can run on any thread in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Generator for replica `replica`.
    pub fn replica(&self, replica: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos((replica as u128) << REPLICA_SHIFT);
        rng
    }

    /// Same seed, different stream.
    pub fn with_stream(&self, stream: u64) -> Self {
        Self { seed: self.seed, stream }
    }
}
