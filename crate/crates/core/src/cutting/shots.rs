use rayon::prelude::*;

use super::{CutError, Result};
use crate::rng::{stream, StreamRng};

/// Shots per work item. Chunks are fixed by index, not by worker count.
pub const CHUNK_SHOTS: u64 = 4096;

/// Runs `f(i, rng_i)` for `i in 0..count` with `rng_i = stream(seed, i)` on a
/// pool of `workers` threads. Results come back in index order, so any
/// reduction over them is independent of the worker count.
pub fn run_indexed<T, F>(count: u64, seed: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut StreamRng) -> Result<T> + Sync,
{
    let chunks = count.div_ceil(CHUNK_SHOTS);
    let run_chunk = |c: u64| -> Result<Vec<T>> {
        let lo = c * CHUNK_SHOTS;
        let hi = (lo + CHUNK_SHOTS).min(count);
        (lo..hi)
            .map(|i| {
                let mut rng = stream(seed, i);
                f(i, &mut rng)
            })
            .collect()
    };
    let parts: Vec<Result<Vec<T>>> = if workers <= 1 {
        (0..chunks).map(run_chunk).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| CutError::Pool(e.to_string()))?;
        pool.install(|| (0..chunks).into_par_iter().map(run_chunk).collect())
    };
    let mut out = Vec::with_capacity(count as usize);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn worker_count_does_not_change_results() {
        let f = |i: u64, rng: &mut StreamRng| Ok(i as f64 + rng.gen::<f64>());
        let a = run_indexed(10_000, 7, 1, f).unwrap();
        let b = run_indexed(10_000, 7, 4, f).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10_000);
    }
}
