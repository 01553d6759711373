use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

/// Samples per chunk. Fixed so that results never depend on the thread count.
pub const CHUNK: u64 = 4096;

const KEY_TAG: u64 = 0x6770_6f6c_7974_6f70;

/// Seed and stream identifying a reproducible sample sequence.
///
/// Every chunk gets its own ChaCha8 key built from `(seed, stream, chunk)`,
/// so chunks can be generated in any order on any number of threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn chunk_rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream.to_le_bytes());
        key[16..24].copy_from_slice(&chunk.to_le_bytes());
        key[24..].copy_from_slice(&KEY_TAG.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

/// Runs `f(rng, len)` over consecutive chunks of `samples` in parallel and
/// returns the per-chunk results in chunk order. The first error in chunk
/// order wins.
pub(crate) fn run_chunks<T, F>(rng_spec: &RngSpec, samples: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> Result<T> + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(samples - c * CHUNK);
            f(&mut rng_spec.chunk_rng(c), len)
        })
        .collect()
}
