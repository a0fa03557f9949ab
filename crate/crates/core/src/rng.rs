//! Seedable, splittable random streams.
//!
//! Every stochastic operation takes an [`RngStream`] explicitly. Child streams
//! are derived from a parent seed and a label, so results depend only on the
//! split tree and never on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    seed: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derive an independent child stream identified by `label`.
    pub fn split(&self, label: u64) -> Self {
        Self {
            seed: splitmix64(splitmix64(self.seed) ^ splitmix64(label.wrapping_add(0x5851_F42D_4C95_7F2D))),
        }
    }

    /// Child stream labelled by a string tag, for readability at call sites.
    pub fn split_str(&self, tag: &str) -> Self {
        let h = tag
            .bytes()
            .fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01B3));
        self.split(h)
    }

    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.seed)
    }
}
