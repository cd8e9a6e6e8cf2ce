//! Named random substreams derived from one master seed.
//!
//! Every source of randomness in a run (self-play move sampling, root noise,
//! argmax tie-breaking, arena games, weight init) draws from its own stream so
//! that changing how often one consumer draws never perturbs the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Substream names recorded in the run's config snapshot.
pub const STREAMS: [&str; 6] = ["init", "selfplay", "noise", "tiebreak", "optimise", "arena"];

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn name_hash(name: &str) -> u64 {
    // FNV-1a, stable across platforms and releases
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Derives a 64-bit seed for `(stream, index)` under `master`.
pub fn derive(master: u64, stream: &str, index: u64) -> u64 {
    mix(mix(master ^ name_hash(stream)).wrapping_add(mix(index)))
}

pub fn rng(master: u64, stream: &str, index: u64) -> Rng {
    Rng::seed_from_u64(derive(master, stream, index))
}
