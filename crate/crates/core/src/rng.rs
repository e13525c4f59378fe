//! Seeded generators. All randomness in the crate flows through here.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for replicate `index` of a resampling run. Independent of
/// scheduling, so parallel and sequential runs agree.
pub fn replicate(seed: u64, index: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index))
}
