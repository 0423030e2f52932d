//! Empirical distributions, KS and TV distances, DKW bands.

use alloc::vec::Vec;

use crate::table::Cdf;
use crate::{Error, Result};

/// Right-continuous empirical CDF of a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut sample: Vec<f64>) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Invalid("empty sample"));
        }
        if sample.iter().any(|x| x.is_nan()) {
            return Err(Error::Invalid("NaN in sample"));
        }
        sample.sort_by(f64::total_cmp);
        Ok(Self { sorted: sample })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn at(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }

    pub fn left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s < x) as f64 / self.len() as f64
    }
}

/// sup |F_emp - F| over sample points and reference knots, both one-sided limits.
pub fn ks_distance<C: Cdf + ?Sized>(emp: &EmpiricalCdf, reference: &C) -> f64 {
    let mut d: f64 = 0.0;
    let mut probe = |x: f64| {
        d = d.max((emp.at(x) - reference.at(x)).abs());
        d = d.max((emp.left(x) - reference.left(x)).abs());
    };
    let mut prev = f64::NAN;
    for &x in emp.sorted() {
        if x != prev {
            probe(x);
            prev = x;
        }
    }
    for &x in reference.knots() {
        probe(x);
    }
    d
}

/// KS distance between two tables or functions, probed on a grid.
pub fn sup_distance_on<A: Cdf + ?Sized, B: Cdf + ?Sized>(a: &A, b: &B, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&x| (a.at(x) - b.at(x)).abs())
        .fold(0.0, f64::max)
}

fn check_pmf(p: &[f64]) -> Result<()> {
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 || p.iter().any(|&x| x < -1e-12) {
        return Err(Error::Invalid("pmf not normalized"));
    }
    Ok(())
}

/// (1/2) sum |p - q| for pmfs on 0, 1, 2, ... (shorter one padded with zeros).
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pmf(p)?;
    check_pmf(q)?;
    let n = p.len().max(q.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    Ok(0.5 * (0..n).map(|i| (get(p, i) - get(q, i)).abs()).sum::<f64>())
}

/// Empirical pmf of nonnegative integer observations.
pub fn empirical_pmf(sample: &[u64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::Invalid("empty sample"));
    }
    let max = *sample.iter().max().unwrap_or(&0) as usize;
    let mut counts = alloc::vec![0usize; max + 1];
    for &s in sample {
        counts[s as usize] += 1;
    }
    let n = sample.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / n).collect())
}

/// DKW half-width: P(sup |F_n - F| > eps) <= delta.
pub fn dkw_epsilon(n: usize, delta: f64) -> f64 {
    libm::sqrt(libm::log(2.0 / delta) / (2.0 * n as f64))
}

/// One line of a comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub metric: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}
