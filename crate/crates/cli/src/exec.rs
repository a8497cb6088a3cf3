//! Thread-pool executor for the core crate's parallel loops.

use ppats::exec::Executor;
use rayon::prelude::*;

/// Runs `map` on the current rayon pool.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        items.par_iter().map(f).collect()
    }
}

/// A pool with `threads` workers, or rayon's default size for `None`.
pub fn pool(threads: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = threads {
        anyhow::ensure!(threads > 0, "--threads must be at least 1");
        builder = builder.num_threads(threads);
    }
    Ok(builder.build()?)
}
