//! Seeded random streams.
//!
//! Every stochastic routine in the crate takes either an explicit `u64` seed or
//! a `&mut impl Rng`. Seeds are expanded with ChaCha8 so results are identical
//! across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StdRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive a child seed from a parent seed and a list of tags.
///
/// The derivation is a SHA-256 digest of the parent and the tags, so it is
/// stable across compiler versions and adding a new tag value never perturbs
/// the seeds of existing ones.
pub fn derive_seed(parent: u64, tags: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(parent.to_le_bytes());
    for tag in tags {
        hasher.update((tag.len() as u64).to_le_bytes());
        hasher.update(tag.as_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
