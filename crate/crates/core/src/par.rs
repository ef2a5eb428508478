//! Work units: per-unit random streams and a bounded thread pool.
//!
//! Every Monte Carlo loop is split into fixed-size units. Unit `k` draws
//! from stream `k` of a ChaCha generator keyed by the user seed, so results
//! do not depend on how units are scheduled. Callers merge unit results in
//! unit order.

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;

/// Paths per work unit.
pub const UNIT_PATHS: usize = 256;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GE_THREADS";

/// The generator for work unit `unit` under `seed`.
pub fn unit_rng(seed: u64, unit: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(unit);
    rng
}

/// Worker threads: `GE_THREADS` if set to a positive integer, otherwise the
/// available hardware parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(thread_count())
            .build()
            .expect("thread pool")
    })
}

/// Splits `n_paths` into units of at most [`UNIT_PATHS`].
pub fn unit_sizes(n_paths: usize) -> Vec<usize> {
    let full = n_paths / UNIT_PATHS;
    let mut v = vec![UNIT_PATHS; full];
    if !n_paths.is_multiple_of(UNIT_PATHS) {
        v.push(n_paths % UNIT_PATHS);
    }
    v
}

/// Runs `f(unit_index, unit_size)` over all units and returns the results
/// in unit order.
pub fn map_units<T, F>(n_paths: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize) -> T + Sync,
{
    let sizes = unit_sizes(n_paths);
    pool().install(|| {
        sizes
            .par_iter()
            .enumerate()
            .map(|(k, &n)| f(k, n))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_differ_and_repeat() {
        let a: u64 = unit_rng(7, 0).random();
        let b: u64 = unit_rng(7, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, unit_rng(7, 0).random::<u64>());
    }

    #[test]
    fn units_cover_paths() {
        assert_eq!(unit_sizes(600), vec![256, 256, 88]);
        assert_eq!(unit_sizes(512), vec![256, 256]);
        let total: usize = map_units(1000, |_, n| n).into_iter().sum();
        assert_eq!(total, 1000);
    }
}
