//! Seeded random streams and per-slot observations.
//!
//! Every stream is a ChaCha8 generator seeded through
//! [`ChaCha8Rng::seed_from_u64`], so a `(seed, stream)` pair reproduces the
//! same draws on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::divergence::ObservationFamily;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sub-stream `stream` under `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    mix64(mix64(base) ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One observation of a slice with true mean `mean`.
pub fn draw_observation<R: Rng + ?Sized>(family: ObservationFamily, mean: f64, rng: &mut R) -> f64 {
    match family {
        ObservationFamily::Bernoulli => {
            if rng.random::<f64>() < mean {
                1.0
            } else {
                0.0
            }
        }
        ObservationFamily::Poisson => {
            if mean <= 0.0 {
                return 0.0;
            }
            Poisson::new(mean)
                .expect("positive finite Poisson mean")
                .sample(rng)
        }
    }
}
