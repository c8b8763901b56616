//! Deterministic execution helpers.
//!
//! All data-parallel work in the crate funnels through `map_indexed`,
//! which applies a pure-per-index closure over 0..count and returns the
//! results in index order. With the default `parallel` feature the work
//! runs on a dedicated rayon pool of the requested width; without it
//! the same closure runs sequentially. Because every index owns its
//! entire state (notably its RNG stream), output is identical bit for
//! bit at any worker count.

/// Resolves a requested worker count; 0 means "whatever the host has".
pub fn effective_threads(requested: usize) -> usize {
    if requested == 0 {
        std::thread::available_parallelism()
            .map(|c| c.get())
            .unwrap_or(1)
    } else {
        requested
    }
}

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(threads: usize, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(effective_threads(threads))
        .build()
        .expect("building a thread pool only fails on resource exhaustion");
    pool.install(|| (0..count).into_par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(threads: usize, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let _ = threads;
    (0..count).map(f).collect()
}
