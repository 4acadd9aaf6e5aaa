//! Seedable random substreams.
//!
//! A [`SeedPath`] names a substream as a master seed plus an ordered list of
//! `(label, index)` pairs, e.g. `("recipe", 17) / ("camera", 0)`. The path is
//! hashed into a ChaCha key, so every substream is reproducible on its own and
//! does not depend on the order in which other substreams were consumed or on
//! how many threads are drawing from the generator.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const DOMAIN_TAG: &[u8] = b"phavforge/seed-path/v1";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedPath {
    pub master_seed: u64,
    pub path: Vec<(String, u64)>,
}

impl SeedPath {
    pub fn root(master_seed: u64) -> Self {
        Self {
            master_seed,
            path: Vec::new(),
        }
    }

    /// Extend the path by one `(label, index)` segment.
    pub fn child(&self, label: &str, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push((label.to_owned(), index));
        Self {
            master_seed: self.master_seed,
            path,
        }
    }

    pub fn key(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(DOMAIN_TAG);
        hasher.update(self.master_seed.to_le_bytes());
        hasher.update((self.path.len() as u64).to_le_bytes());
        for (label, index) in &self.path {
            // length-prefixed so ("ab", 1) and ("a", ...) never collide
            hasher.update((label.len() as u64).to_le_bytes());
            hasher.update(label.as_bytes());
            hasher.update(index.to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        key
    }

    pub fn stream(&self) -> Stream {
        Stream {
            inner: ChaCha8Rng::from_seed(self.key()),
        }
    }
}

impl std::fmt::Display for SeedPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.master_seed)?;
        for (label, index) in &self.path {
            write!(f, "/{label}:{index}")?;
        }
        Ok(())
    }
}

/// A random stream owned by exactly one consumer.
#[derive(Clone, Debug)]
pub struct Stream {
    inner: ChaCha8Rng,
}

impl RngCore for Stream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
