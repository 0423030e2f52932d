//! Thread pool plumbing.

use anyhow::Context;
use fbschur_core::exec::Exec;
use rayon::prelude::*;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "FBSCHUR_THREADS";

/// Runs row jobs on the current rayon pool, collecting in order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Exec for Rayon {
    fn map<T: Send, F: Fn(usize) -> T + Sync>(&self, n: usize, f: F) -> Vec<T> {
        (0..n).into_par_iter().map(&f).collect()
    }
}

pub fn default_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` inside a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .context("building thread pool")?;
    Ok(pool.install(f))
}
