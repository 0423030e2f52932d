//! Quadrature rules.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C;
#[allow(unused_imports)]
use num_traits::Float;

/// Gauss-Legendre nodes and weights on [a, b].
pub fn gauss_legendre(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(m);
    let mut w = Vec::with_capacity(m);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for i in 0..m {
        let mut t = libm::cos(PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 0 { 1.0 } else { p1 };
            let pm1 = if m <= 1 { 1.0 } else { p0 };
            dp = m as f64 * (t * p - pm1) / (t * t - 1.0);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x.push(mid - half * t);
        w.push(2.0 * half / ((1.0 - t * t) * dp * dp));
    }
    (x, w)
}

/// Truncated trapezoid rule on the vertical line Re z = c for
/// int f(z) dz / (2 pi i). Nodes are symmetric about the real axis.
#[derive(Debug, Clone)]
pub struct VerticalLine {
    pub nodes: Vec<C>,
    /// Weight already includes the 1/(2 pi) from dz/(2 pi i) = dy/(2 pi).
    pub weight: f64,
}

impl VerticalLine {
    pub fn new(c: f64, t_max: f64, h: f64) -> Self {
        let k = (t_max / h).ceil() as i64;
        let nodes = (-k..=k).map(|j| C::new(c, j as f64 * h)).collect();
        Self { nodes, weight: h / (2.0 * PI) }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Equispaced nodes r e^{2 pi i a / n} on a circle.
pub fn circle(r: f64, n: usize) -> Vec<C> {
    (0..n)
        .map(|a| C::from_polar(r, 2.0 * PI * a as f64 / n as f64))
        .collect()
}
