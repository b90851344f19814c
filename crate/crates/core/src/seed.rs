//! Deterministic seed derivation.
//!
//! Every replicate, integral estimate and rung of an experiment draws from its
//! own generator whose seed is a pure function of the master seed and a path of
//! stream labels. Results therefore do not depend on thread count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

#[inline]
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in the tree of seed streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeedStream(u64);

impl SeedStream {
    pub fn new(master: u64) -> Self {
        SeedStream(splitmix64(master ^ 0x5EED_0F_C0FFEE))
    }

    /// Child stream for a label. Distinct labels give unrelated streams.
    pub fn child(self, label: u64) -> Self {
        SeedStream(splitmix64(self.0 ^ splitmix64(label.wrapping_add(0xA5A5_A5A5))))
    }

    /// Child stream for a string label, hashed with FNV-1a.
    pub fn named(self, label: &str) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        self.child(h)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> SimRng {
        SimRng::seed_from_u64(self.0)
    }
}
