//! Deterministic RNG streams.
//!
//! All randomness in a run flows from the single config seed through named
//! sub-streams, so that independent parts of the system (world init, UE
//! motion, action sampling, minibatch shuffling) draw from decorrelated
//! generators and any one of them can be replayed in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive a generator for `(seed, name, indices)`.
///
/// The stream seed is the SHA-256 digest of the root seed, the stream name,
/// and the index path (e.g. episode number, worker id), so streams never
/// overlap and adding a new stream name cannot shift existing ones.
pub fn stream(seed: u64, name: &str, indices: &[u64]) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update([0x1f]);
    hasher.update(name.as_bytes());
    for ix in indices {
        hasher.update([0x1f]);
        hasher.update(ix.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}
