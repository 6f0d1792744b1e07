//! Seed plumbing shared by the stochastic methods.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator every stochastic routine in this crate draws from.
pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `index`-th member of an ensemble built from `seed`.
///
/// Member 0 reuses `seed` unchanged, so a single-member ensemble draws exactly
/// the same stream as its base method called with `seed`.
pub fn member_seed(seed: u64, index: usize) -> u64 {
    if index == 0 {
        seed
    } else {
        splitmix64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn member_zero_is_the_base_seed() {
        assert_eq!(member_seed(42, 0), 42);
        assert_ne!(member_seed(42, 1), member_seed(42, 2));
    }
}
