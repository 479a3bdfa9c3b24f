//! Seeded random streams.
//!
//! Every stochastic routine in the crate takes an explicit RNG; these helpers
//! build ChaCha8 streams whose keys are injective in their inputs, so distinct
//! `(seed, labels)` tuples never share a stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StreamRng {
    derive_stream(seed, &[])
}

/// Stream keyed by `seed` and up to three labels (family, estimator, trial, ...).
///
/// The 256-bit ChaCha key is the little-endian concatenation of the seed and
/// the labels, with unused words zero and a length tag in the final byte.
pub fn derive_stream(seed: u64, labels: &[u64]) -> StreamRng {
    assert!(
        labels.len() <= 3,
        "at most three stream labels are supported"
    );
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    for (i, label) in labels.iter().enumerate() {
        let start = 8 * (i + 1);
        key[start..start + 8].copy_from_slice(&label.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    // Distinguishes e.g. (s, []) from (s, [0]) which share a key.
    rng.set_stream(labels.len() as u64);
    rng
}
