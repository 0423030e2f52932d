//! Parallel Monte Carlo over the tie sampler.
//!
//! Sample `i` is drawn from its own ChaCha stream keyed by `(seed, i)`, so the
//! output is the same for any number of worker threads.

use fbschur_core::tie::{stream_rng, Layout, TieSample, TieSpec};
use rayon::prelude::*;

pub fn simulate(spec: &TieSpec, samples: usize, seed: u64) -> fbschur_core::Result<Vec<TieSample>> {
    let layout = Layout::new(spec)?;
    Ok(simulate_layout(&layout, samples, seed))
}

pub fn simulate_layout(layout: &Layout, samples: usize, seed: u64) -> Vec<TieSample> {
    (0..samples)
        .into_par_iter()
        .map(|i| layout.sample_lambda1(&mut stream_rng(seed, i as u64)))
        .collect()
}
