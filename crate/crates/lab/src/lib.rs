//! Std companion to `fbschur-core`: a rayon executor, parallel sampling,
//! self-describing CSV artifacts, SVG overlays and the `fbschur` command line.

pub mod cli;
pub mod config;
pub mod io;
pub mod plot;
pub mod pool;
pub mod sim;

pub use fbschur_core as core;
