//! Data-parallel map helpers.
//!
//! With the `parallel` feature (default) these fan out over rayon; without it
//! they degrade to plain sequential loops so the crate still builds on
//! single-threaded targets. `map_seq` is always sequential and exists so the
//! bench suite can compare both paths in one binary.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;

/// Order-preserving map over a slice.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sequential twin of [`map`], kept around for benchmarking the fallback.
pub fn map_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Order-preserving fallible map. Fails with the first error in input order.
pub fn try_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    let collected: Vec<Result<R>> = map(items, f);
    collected.into_iter().collect()
}

/// Run `f` with a bounded worker pool.
///
/// `workers = None` uses the global pool; `Some(n)` caps it at `n` threads.
/// Without the `parallel` feature this just calls `f`.
pub fn install<R, F>(workers: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match workers {
            Some(n) if n >= 1 => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .expect("failed to build worker pool");
                pool.install(f)
            }
            _ => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        f()
    }
}
