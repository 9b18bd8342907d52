//! Job execution hook and seed derivation.
//!
//! The core never spawns threads. Stages that fan out over independent jobs
//! (CV folds, candidate feature subsets, members of an update set) go through
//! an [`Executor`], so a threaded implementation can be plugged in from a
//! `std` crate. Jobs are pure and results come back in job order, which keeps
//! output identical for any worker count.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Result;

pub type Job<'a> = dyn Fn(usize) -> Result<f64> + Sync + 'a;

pub trait Executor: Sync {
    /// Runs `job(0..len)` and returns the results in index order.
    fn map(&self, len: usize, job: &Job<'_>) -> Result<Vec<f64>>;
}

/// Runs jobs in order on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map(&self, len: usize, job: &Job<'_>) -> Result<Vec<f64>> {
        (0..len).map(job).collect()
    }
}

pub type Rng = ChaCha8Rng;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed for `(tag, index)` under `root`.
pub fn derive_seed(root: u64, tag: u64, index: u64) -> u64 {
    mix(mix(root ^ mix(tag)) ^ index)
}

pub fn rng_from(root: u64, tag: u64, index: u64) -> Rng {
    Rng::seed_from_u64(derive_seed(root, tag, index))
}

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
