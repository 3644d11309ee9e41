//! Worker pool behind the core's `Executor`.

use chmass_core::mass::Executor;
use rayon::prelude::*;

/// Runs node evaluations on the current rayon pool; results come back in
/// index order, so sums taken afterwards do not depend on the thread count.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pool;

impl Executor for Pool {
    fn map<T: Send, F: Fn(usize) -> T + Sync>(&self, n: usize, f: F) -> Vec<T> {
        (0..n).into_par_iter().map(|i| f(i)).collect()
    }
}

/// Thread cap from `CHMASS_THREADS`; `None` when unset or unparsable.
pub fn thread_cap() -> Option<usize> {
    std::env::var("CHMASS_THREADS").ok()?.trim().parse().ok().filter(|n: &usize| *n > 0)
}

/// A pool sized by `CHMASS_THREADS` (rayon's default otherwise).
pub fn build_pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}
