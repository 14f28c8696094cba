//! Seeded generator streams.
//!
//! Every Monte Carlo trial (or session block) draws from its own ChaCha
//! stream selected by `(seed, index)`, so results do not depend on how work
//! is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Purpose tags separate independent uses of the same `(seed, index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Channel = 1,
    Trace = 2,
    Codebook = 3,
}

pub fn stream_rng(seed: u64, purpose: Purpose, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ ((purpose as u64) << 56));
    rng.set_stream(index);
    rng
}
