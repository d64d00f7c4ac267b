//! Fixed-chunk work splitting.
//!
//! Monte Carlo loops are split into a fixed number of chunks regardless of
//! thread count; each chunk's result is merged in chunk order, so artifacts
//! are byte-identical whether the run uses one thread or many. Per-path RNG
//! substreams make the chunks statistically independent by construction.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub const CHUNKS: u64 = 64;

/// Number of worker threads: explicit request, then `NHSUB_THREADS`, then
/// the machine's parallelism.
pub fn thread_count(requested: Option<usize>) -> usize {
    if let Some(n) = requested {
        return n.max(1);
    }
    if let Ok(v) = std::env::var("NHSUB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs `f` over `CHUNKS` contiguous ranges covering `0..n` and returns the
/// per-chunk results in chunk order. The first error (in chunk order) wins.
pub fn run_chunked<T, F, E>(n: u64, threads: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(std::ops::Range<u64>) -> Result<T, E> + Sync,
{
    let chunks = CHUNKS.min(n.max(1));
    let bounds: Vec<std::ops::Range<u64>> = (0..chunks)
        .map(|c| (n * c / chunks)..(n * (c + 1) / chunks))
        .collect();
    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<Result<T, E>>>> =
        (0..bounds.len()).map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..threads.max(1).min(bounds.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= bounds.len() {
                    break;
                }
                let r = f(bounds[i].clone());
                *results[i].lock().expect("poisoned chunk slot") = Some(r);
            });
        }
    });

    let mut out = Vec::with_capacity(bounds.len());
    for slot in results {
        match slot.into_inner().expect("poisoned chunk slot").expect("chunk completed") {
            Ok(v) => out.push(v),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
