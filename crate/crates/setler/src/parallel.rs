//! Thread-pool executor.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use setler_core::Executor;

/// Runs jobs on a rayon pool. Results come back in index order, so
/// reductions match [`setler_core::Sequential`] exactly.
pub struct Parallel {
    pool: Option<ThreadPool>,
}

impl Parallel {
    /// `threads = 0` uses the global pool.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = if threads == 0 {
            None
        } else {
            Some(ThreadPoolBuilder::new().num_threads(threads).build()?)
        };
        Ok(Self { pool })
    }
}

impl Executor for Parallel {
    fn map_indexed<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let run = || (0..n).into_par_iter().map(&job).collect();
        match &self.pool {
            Some(p) => p.install(run),
            None => run(),
        }
    }
}
