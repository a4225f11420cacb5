//! Execution strategy for independent jobs (sweep columns, MC batches).
//!
//! Implementations must return results in index order so that reductions
//! are reproducible regardless of scheduling.

use alloc::vec::Vec;

pub trait Executor {
    fn map_indexed<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(job).collect()
    }
}
