//! Free-boundary Schur measures.
//!
//! Exact combinatorics and laws, the LPP-on-a-tie sampler, finite pfaffian
//! kernels on the half-integer lattice and the limiting hypergeometric Airy
//! kernels. Everything here is `no_std` with `alloc`; IO, threads and the CLI
//! live in the `fbschur` crate.

#![no_std]

extern crate alloc;

pub mod error;
pub mod exec;
pub mod finite_kernel;
pub mod limit;
pub mod linalg;
pub mod measure;
pub mod partition;
pub mod quad;
pub mod special;
pub mod stats;
pub mod table;
pub mod tie;

pub use error::{Error, Result};
pub use num_complex::Complex64;
