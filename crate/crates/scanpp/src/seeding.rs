//! Deterministic ChaCha seeding: replicate `b` draws from stream `b` of the
//! master-seeded generator, so Monte-Carlo loops are reproducible
//! bit-for-bit and parallelize without shared state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 step: derives an independent master seed for a separate
/// sampling stage (e.g. the second Monte-Carlo stage of the min-p
/// adjustment) from `(master, tag)`.
pub(crate) fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master.wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
