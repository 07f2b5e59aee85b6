//! Seed derivation.
//!
//! Every random draw in a run descends from one 64-bit master seed. A
//! realization's generator is seeded with
//!
//! ```text
//! realization_seed = splitmix64(master_seed ^ splitmix64(index + 1))
//! ```
//!
//! and the BS→RIS, RIS→user, direct link and random-phase draws each use
//! their own ChaCha8 stream ([`Stream`]) of that seed. Execution order never
//! enters the derivation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn realization_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index.wrapping_add(1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    BsToRis = 0,
    RisToUser = 1,
    Direct = 2,
    Phases = 3,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference SplitMix64 generator seeded with 0.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(
            splitmix64(0x9E37_79B9_7F4A_7C15),
            0x6E78_9E6A_A1B9_65F4
        );
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let seed = realization_seed(7, 3);
        let a: u64 = stream_rng(seed, Stream::BsToRis).random();
        let b: u64 = stream_rng(seed, Stream::RisToUser).random();
        let a2: u64 = stream_rng(seed, Stream::BsToRis).random();
        assert_ne!(a, b);
        assert_eq!(a, a2);
        assert_ne!(realization_seed(7, 3), realization_seed(7, 4));
    }
}
