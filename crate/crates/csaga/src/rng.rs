//! One PRNG policy for the whole crate: ChaCha8 seeded explicitly, with
//! a distinct stream per concern so subsampling, scheduling, and synthetic
//! data generation stay independent even under a shared seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_SCHEDULER: u64 = 1;
pub const STREAM_SUBSAMPLE: u64 = 2;
pub const STREAM_SYNTH: u64 = 3;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
