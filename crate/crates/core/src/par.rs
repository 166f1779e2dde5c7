//! Scoped worker threads for independent per-index work.
//!
//! Results are returned in index order, so output never depends on the
//! number of workers.

use std::num::NonZeroUsize;

/// Environment variable overriding the default worker count.
pub const THREADS_ENV: &str = "CAUSAL_DESIGN_THREADS";

/// Worker count: `CAUSAL_DESIGN_THREADS` when set to a positive integer,
/// otherwise the available parallelism.
pub fn default_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1))
}

/// `f(0), .., f(n - 1)` computed on up to `threads` workers.
pub(crate) fn map_indices<T, F>(n: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.clamp(1, n.max(1));
    if threads == 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(threads);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = (t * chunk).min(n);
                let hi = ((t + 1) * chunk).min(n);
                s.spawn(move || (lo..hi).map(f).collect::<Vec<T>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
