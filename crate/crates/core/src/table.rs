//! Sampled distribution functions with metadata.

use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// How a table is read between its knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    /// Right-continuous step function, as for integer-valued variables.
    Step,
    /// Piecewise linear, clamped to the end values outside the grid.
    Linear,
}

/// A CDF on an increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub interp: Interp,
    pub meta: Vec<(String, String)>,
}

/// Anything that can be compared against an empirical CDF.
pub trait Cdf {
    fn at(&self, x: f64) -> f64;
    /// Left limit F(x-).
    fn left(&self, x: f64) -> f64 {
        self.at(x)
    }
    /// Points where the function jumps.
    fn knots(&self) -> &[f64] {
        &[]
    }
}

/// Wraps a continuous CDF given as a closure.
pub struct Continuous<F>(pub F);

impl<F: Fn(f64) -> f64> Cdf for Continuous<F> {
    fn at(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

impl DistributionTable {
    pub fn new(grid: Vec<f64>, cdf: Vec<f64>, interp: Interp) -> Result<Self> {
        if grid.len() != cdf.len() || grid.is_empty() {
            return Err(Error::Invalid("grid and values must be nonempty and of equal length"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("grid must be strictly increasing"));
        }
        if cdf.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite table value"));
        }
        Ok(Self { grid, cdf, interp, meta: Vec::new() })
    }

    /// CDF on the integers start, start+1, ... from a pmf.
    pub fn from_pmf(start: i64, pmf: &[f64]) -> Result<Self> {
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let grid = (0..pmf.len()).map(|i| (start + i as i64) as f64).collect();
        Self::new(grid, cdf, Interp::Step)
    }

    /// Integer-grid CDF from values at start, start+1, ...
    pub fn lattice(start: i64, cdf: Vec<f64>) -> Result<Self> {
        let grid = (0..cdf.len()).map(|i| (start + i as i64) as f64).collect();
        Self::new(grid, cdf, Interp::Step)
    }

    pub fn with_meta(mut self, key: &str, value: String) -> Self {
        self.meta.push((key.into(), value));
        self
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Largest downward step, zero for a nondecreasing table.
    pub fn monotonicity_defect(&self) -> f64 {
        self.cdf.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }

    /// Checks values lie in [-tol, 1 + tol] and never decrease by more than tol.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let d = self.monotonicity_defect();
        if d > tol {
            return Err(Error::Diagnostic { what: "CDF decreases", value: d, limit: tol });
        }
        for &v in &self.cdf {
            if v < -tol || v > 1.0 + tol {
                return Err(Error::Diagnostic { what: "CDF outside [0, 1]", value: v, limit: tol });
            }
        }
        Ok(())
    }

    /// Point masses of a step table, the first knot carrying F(first).
    pub fn pmf(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cdf
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    /// Value at integer k of a lattice table: 0 before the grid, last value after.
    pub fn at_int(&self, k: i64) -> f64 {
        self.at(k as f64)
    }
}

impl Cdf for DistributionTable {
    fn at(&self, x: f64) -> f64 {
        let g = &self.grid;
        match self.interp {
            Interp::Step => {
                let idx = g.partition_point(|&t| t <= x);
                if idx == 0 {
                    0.0
                } else {
                    self.cdf[idx - 1]
                }
            }
            Interp::Linear => {
                if x <= g[0] {
                    return self.cdf[0];
                }
                let last = g.len() - 1;
                if x >= g[last] {
                    return self.cdf[last];
                }
                let i = g.partition_point(|&t| t <= x);
                let (x0, x1) = (g[i - 1], g[i]);
                let (y0, y1) = (self.cdf[i - 1], self.cdf[i]);
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    fn left(&self, x: f64) -> f64 {
        match self.interp {
            Interp::Step => {
                let idx = self.grid.partition_point(|&t| t < x);
                if idx == 0 {
                    0.0
                } else {
                    self.cdf[idx - 1]
                }
            }
            Interp::Linear => self.at(x),
        }
    }

    fn knots(&self) -> &[f64] {
        match self.interp {
            Interp::Step => &self.grid,
            Interp::Linear => &[],
        }
    }
}
