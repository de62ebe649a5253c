//! Deterministic seeding helpers.
//!
//! Every randomized routine in this crate takes either an explicit `u64`
//! seed or an `&mut impl Rng`. Seeds expand to ChaCha8 streams, and batch
//! work (estimator replications, GA trials) derives one independent seed
//! per unit of work from a master seed, so results are bit-identical
//! regardless of how the work is scheduled.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The PRNG used throughout: fast, seedable, and stable across platforms.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives the seed for work unit `index` from a master seed.
///
/// This is the SplitMix64 output function applied to the master seed's
/// stream position `index + 1`; distinct indices give well-scrambled,
/// independent seeds even for masters like 0, 1, 2.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let z = master.wrapping_add((index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64_mix(z)
}

fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
