//! The single deterministic generator used by every randomized operation.
//!
//! All entry points take a `u64` seed and expand it with ChaCha8. Nested
//! randomized calls draw a fresh `u64` from the parent stream and seed a new
//! generator with it, so results depend only on the top-level seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws a child seed from `rng`.
pub fn child_seed(rng: &mut Rng) -> u64 {
    use rand::RngCore;
    rng.next_u64()
}
