//! Counter-based keyed randomness.
//!
//! One root seed drives the whole pipeline. Every consumer derives its own
//! stream by pushing path segments (example index, iteration, draw index),
//! so concurrent or reordered work never perturbs another consumer's draws:
//! identical `(root_seed, path)` always yields identical sequences, across
//! runs and platforms.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A derivable, reproducible random stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    root_seed: u64,
    path: Vec<u64>,
}

impl RngStream {
    pub fn new(root_seed: u64) -> Self {
        Self {
            root_seed,
            path: Vec::new(),
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Child stream with one extra path segment.
    pub fn derive(&self, segment: u64) -> Self {
        let mut path = self.path.clone();
        path.push(segment);
        Self {
            root_seed: self.root_seed,
            path,
        }
    }

    /// Child stream keyed by a string label (hashed into a segment).
    pub fn derive_label(&self, label: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(label.as_bytes());
        let digest = hasher.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        self.derive(u64::from_le_bytes(bytes))
    }

    /// Instantiate the generator for this stream. Calling twice on the same
    /// stream yields identical generators.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut hasher = Sha256::new();
        hasher.update(self.root_seed.to_le_bytes());
        for segment in &self.path {
            hasher.update(segment.to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        ChaCha12Rng::from_seed(seed)
    }
}
