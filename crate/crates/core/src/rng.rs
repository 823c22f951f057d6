//! Seeded random streams.
//!
//! Every random decision in the engine draws from ChaCha8 (`rand_chacha`).
//! Independent streams are carved out of one run seed with ChaCha's 64-bit
//! stream selector, so work items can be processed in any order (or in
//! parallel) and still consume exactly the same random numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type EngineRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> EngineRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `(major, minor)` of the generator keyed by `seed`.
///
/// `major` and `minor` are packed as the high and low 32 bits of the stream id.
pub fn stream(seed: u64, major: u64, minor: u64) -> EngineRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((major << 32) | (minor & 0xffff_ffff));
    rng
}
