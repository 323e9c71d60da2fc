//! Seeded, splittable random streams.
//!
//! Every sampler draws from ChaCha8 generators. Work is cut into chunks of
//! [`CHUNK_SIZE`] samples; chunk `c` of a run seeded with `s` uses the stream
//! `ChaCha8Rng::seed_from_u64(derive_seed(s, c))`. Chunk boundaries never
//! depend on the number of worker threads, so merged results do not either.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type StreamRng = ChaCha8Rng;

/// Samples per chunk.
pub const CHUNK_SIZE: usize = 8192;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `hash(seed, index)`: the seed of the `index`-th derived stream.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn stream(seed: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, index))
}

/// Runs `work(rng, len)` over fixed-size chunks covering `n` samples in
/// parallel and returns the per-chunk results in chunk order.
pub fn map_chunks<T, F>(n: usize, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, usize) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
            let mut rng = stream(seed, c as u64);
            work(&mut rng, len)
        })
        .collect()
}
