//! Seeded random streams.
//!
//! Every stochastic transform draws from a ChaCha8 stream keyed by
//! SHA-256(seed, record id, method tag). A record's augmentation is therefore
//! reproducible on its own, independent of corpus order and of whether
//! records are processed sequentially or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Seed used when none is configured.
pub const DEFAULT_SEED: u64 = 42;

/// Stream for one (record, method) pair under a run seed.
pub fn record_stream(seed: u64, record_id: &str, method: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update([0u8]);
    hasher.update(record_id.as_bytes());
    hasher.update([0u8]);
    hasher.update(method.as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Stream keyed by an arbitrary label instead of a record id (corpus-level
/// shuffles, pair ordering).
pub fn labeled_stream(seed: u64, label: &str) -> ChaCha8Rng {
    record_stream(seed, label, "")
}

/// Seed for repeated augmentation passes (the 1:3 output ratio). Pass 0 is
/// the run seed itself.
pub fn derived_seed(seed: u64, pass: u32) -> u64 {
    if pass == 0 {
        return seed;
    }
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(pass.to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is long enough"))
}
