//! Row-parallel execution hook.
//!
//! The heavy assemblies (coupling matrices, kernel windows) are written as
//! independent per-row jobs. The core runs them serially; the std crate plugs
//! in a thread pool. Results are always collected in row order, so the output
//! does not depend on the executor.

use alloc::vec::Vec;

pub trait Exec: Sync {
    fn map<T: Send, F: Fn(usize) -> T + Sync>(&self, n: usize, f: F) -> Vec<T>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Exec for Serial {
    fn map<T: Send, F: Fn(usize) -> T + Sync>(&self, n: usize, f: F) -> Vec<T> {
        (0..n).map(f).collect()
    }
}
