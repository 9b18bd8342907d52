use fscale_core::exec::{Executor, Job};
use rayon::prelude::*;

/// Runs executor jobs on the current rayon pool. Results keep job order, so
/// output does not depend on the number of workers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map(&self, len: usize, job: &Job<'_>) -> fscale_core::Result<Vec<f64>> {
        (0..len).into_par_iter().map(job).collect()
    }
}
