//! Reproducible random streams for batch simulation.
//!
//! Each path gets its own ChaCha stream: the master seed keys the cipher and
//! the path index selects the stream, so streams are disjoint by construction
//! and a batch result depends only on (master seed, path index), never on
//! scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type Stream = ChaCha8Rng;

/// Stream 0 under the master seed.
pub fn master_rng(seed: u64) -> Stream {
    path_rng(seed, 0)
}

/// The independent stream assigned to one path index.
pub fn path_rng(master_seed: u64, path_index: u64) -> Stream {
    let mut rng = Stream::seed_from_u64(master_seed);
    rng.set_stream(path_index);
    rng
}

/// Run `job` once per path index on the current rayon pool, each invocation
/// with its own stream. The output vector is ordered by path index, so the
/// result is bit-identical for any worker count.
pub fn run_paths<T, F>(n_paths: u64, master_seed: u64, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> T + Sync,
{
    (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(master_seed, i);
            job(i, &mut rng)
        })
        .collect()
}
