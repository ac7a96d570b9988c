//! Deterministic parallel Monte Carlo: paths are split into fixed chunks,
//! each chunk accumulates integer counts, and chunks are summed.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};

const CHUNK: u64 = 256;

/// Runs `per_path(index, counts)` for every path index in `0..n_paths` and
/// returns the summed counts of length `width`. `threads = None` uses the
/// ambient rayon pool.
pub fn count_paths<F>(n_paths: u64, width: usize, threads: Option<usize>, per_path: F) -> Result<Vec<u64>>
where
    F: Fn(u64, &mut [u64]) + Sync,
{
    let work = || {
        let n_chunks = n_paths.div_ceil(CHUNK);
        (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut local = vec![0u64; width];
                for i in c * CHUNK..((c + 1) * CHUNK).min(n_paths) {
                    per_path(i, &mut local);
                }
                local
            })
            .reduce(
                || vec![0u64; width],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    };
    match threads {
        None => Ok(work()),
        Some(0) => domain("thread count must be at least 1"),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

/// Per-path results collected in path order.
pub fn map_paths<T, F>(n_paths: u64, threads: Option<usize>, per_path: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let work = || (0..n_paths).into_par_iter().map(&per_path).collect::<Vec<T>>();
    match threads {
        None => Ok(work()),
        Some(0) => domain("thread count must be at least 1"),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_independent_of_threads() {
        let f = |i: u64, c: &mut [u64]| {
            c[(i % 3) as usize] += i;
        };
        let a = count_paths(10_000, 3, Some(1), f).unwrap();
        let b = count_paths(10_000, 3, Some(4), f).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().sum::<u64>(), 10_000 * 9_999 / 2);
        assert!(count_paths(1, 1, Some(0), f).is_err());
    }
}
