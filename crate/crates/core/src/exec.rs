use alloc::vec::Vec;

/// Runs independent jobs and returns their results in job order.
///
/// Implementations may evaluate jobs concurrently but must return
/// `results[i] == job(i)`. Callers reduce the returned vector sequentially,
/// which keeps every result independent of the number of workers.
pub trait Executor: Sync {
    fn map<T, F>(&self, jobs: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Evaluates jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, jobs: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..jobs).map(job).collect()
    }
}
