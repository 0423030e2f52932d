//! Finite pfaffian kernel of the shifted first row, lambda_1 + 2 D_t.
//!
//! The three blocks are double contour integrals over circles, evaluated by the trapezoid rule. For equispaced nodes the coupling factor
//! splits into node-wise prefactors, a circulant in (b - a) and a Hankel-type
//! term in (a + b), so one kernel window costs O(N^2 W) without storing the
//! N x N coupling matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C;
#[allow(unused_imports)]
use num_traits::Float;

use crate::exec::Exec;
use crate::linalg::KernelBlocks;
use crate::measure::{deconvolve_shift, Kind, Label, MeasureSpec, ThetaShiftLaw, Variant};
use crate::special::{qpoch, theta3};
use crate::table::DistributionTable;
use crate::{Error, Result};

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

fn log_h(kind: Kind, scale: f64, z: C) -> C {
    if scale == 0.0 {
        return c(0.0);
    }
    match kind {
        Kind::Plancherel { eps } => z * (eps * scale),
        Kind::Geometric { q, n } => -(1.0 - z * (scale * q)).ln() * n as f64,
    }
}

fn kind_size(kind: Kind) -> f64 {
    match kind {
        Kind::Plancherel { eps } => eps,
        Kind::Geometric { q, n } => q * n as f64,
    }
}

/// log F(z), the ratio of specialization products attached to each lattice point.
pub fn log_f(spec: &MeasureSpec, z: C) -> C {
    let (u, v) = (spec.u, spec.v);
    let plus = spec.kind;
    let minus = match spec.variant {
        Variant::UpDown => Some(spec.kind),
        Variant::Upwards => None,
    };
    let zi = 1.0 / z;
    let hm = |s: f64, x: C| minus.map_or(c(0.0), |k| log_h(k, s, x));
    let mut acc = log_h(plus, 1.0, z) - hm(1.0, zi);
    let reach = 1.0 + kind_size(plus) * z.norm().max(zi.norm());
    let mut m = 1;
    loop {
        let c1 = u.powi(2 * m) * v.powi(2 * m - 2);
        let c2 = (u * v).powi(2 * m);
        let c3 = u.powi(2 * m - 2) * v.powi(2 * m);
        acc += hm(c1, z) + log_h(plus, c2, z) - log_h(plus, c3, zi) - hm(c2, zi);
        let top = c1.max(c2).max(c3);
        if top * reach < 1e-18 || m > 100_000 {
            return acc;
        }
        m += 1;
    }
}

/// Boundary factor g(z) of the label; identically 1 for the free label.
pub fn g_factor(spec: &MeasureSpec, z: C) -> C {
    let (u, v) = (spec.u, spec.v);
    let uv = u * v;
    let p = uv * uv;
    let b = &spec.boundary;
    let one = c(1.0);
    match spec.label {
        Label::Free => one,
        Label::AA => {
            let (a1, a2) = (b.a1, b.a2);
            qpoch(z * u, uv) / qpoch(v / z, uv) * qpoch(c(a1 * u * v * v) / z, p) * qpoch(c(a2 * v) / z, p)
                / (qpoch(z * (a1 * u), p) * qpoch(z * (a2 * u * u * v), p))
                / (qpoch(c(a1 * a2 * uv), p) * qpoch(c(-uv), uv))
        }
        Label::BB => {
            let (b1, b2) = (b.b1, b.b2);
            qpoch(c(-v) / z, uv) / qpoch(-z * u, uv) * qpoch(-z * (b1 * u), p) * qpoch(-z * (b2 * u * u * v), p)
                / (qpoch(c(-b1 * u * v * v) / z, p) * qpoch(c(-b2 * v) / z, p))
                / (qpoch(c(b1 * b2 * uv), p) * qpoch(c(-uv), uv))
        }
        Label::AB => {
            let (a1, b2) = (b.a1, b.b2);
            let num = [
                z * u,
                c(-v) / z,
                c(a1 * u * v * v) / z,
                -z * (b2 * u * u * v),
                c(-uv),
                c(-a1 * b2 * uv),
                c(a1 * p),
                c(b2 * p),
            ];
            let den = [
                -z * (u * u * v),
                c(u * v * v) / z,
                z * (a1 * u),
                c(-b2 * v) / z,
                c(-a1 * uv),
                c(-b2 * uv),
            ];
            let mut r = one;
            for x in num {
                r *= qpoch(x, p);
            }
            for x in den {
                r /= qpoch(x, p);
            }
            for x in [-uv, -uv, a1 * uv, b2 * uv] {
                r /= qpoch(c(x), uv);
            }
            r
        }
    }
}

/// Radii of the circles carrying each block, all inside the annulus of
/// analyticity (lo, hi) = (max(v, q), min(1/q, 1/u)):
/// r22 < r' < rho < r < r11, where (1,2) integrates over |z| = r, |w| = r'.
///
/// The blocks are conjugated by rho^m, which leaves every pfaffian unchanged
/// and makes all three blocks decay away from the edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub r11: f64,
    pub r: f64,
    pub r_prime: f64,
    pub r22: f64,
    pub rho: f64,
    pub nodes: usize,
}

impl Contour {
    /// Radii lo (hi/lo)^f at f = 5/6, 2/3, 1/3, 1/6 and 1/2.
    pub fn for_spec(spec: &MeasureSpec, nodes: usize) -> Result<Self> {
        Self::with_fractions(spec, nodes, [5.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 0.5])
    }

    /// Radii at given log-fractions of the annulus, in the order r11, r, r', r22, rho.
    pub fn with_fractions(spec: &MeasureSpec, nodes: usize, f: [f64; 5]) -> Result<Self> {
        spec.validate()?;
        if !(f[0] > f[1] && f[1] > f[2] && f[2] > f[3] && f[3] > 0.0 && f[0] < 1.0) {
            return Err(Error::Invalid("radius fractions must decrease inside (0, 1)"));
        }
        let q = match spec.kind {
            Kind::Geometric { q, .. } => q,
            Kind::Plancherel { .. } => 0.0,
        };
        let mut lo = spec.v.max(q);
        let inv = |x: f64| if x > 0.0 { 1.0 / x } else { f64::INFINITY };
        let mut hi = inv(q).min(inv(spec.u));
        if lo == 0.0 {
            lo = (0.5f64).min(hi / 4.0);
        }
        if !hi.is_finite() {
            hi = (2.0f64).max(4.0 * lo);
        }
        if hi <= lo {
            return Err(Error::Domain("empty annulus of analyticity"));
        }
        let ratio = hi / lo;
        let at = |x: f64| lo * libm::pow(ratio, x);
        let uv = spec.uv();
        if uv > 0.0 && libm::pow(ratio, f[1] - f[2]) * uv * uv >= 1.0 {
            return Err(Error::Domain("annulus too wide for the contour pair"));
        }
        Ok(Self { r11: at(f[0]), r: at(f[1]), r_prime: at(f[2]), r22: at(f[3]), rho: at(f[4]), nodes })
    }
}

/// sum_d exp(a d^2 + b d + c0), a < 0.
fn gauss_series(a: f64, b: C, c0: C) -> C {
    let term = |d: i64| (c0 + b * d as f64 + a * (d * d) as f64).exp();
    let peak = libm::round(-b.re / (2.0 * a)) as i64;
    let log_top = c0.re + b.re * peak as f64 + a * (peak * peak) as f64;
    let mut s = term(peak);
    for dir in [1i64, -1] {
        let mut d = peak + dir;
        loop {
            let lr = c0.re + b.re * d as f64 + a * (d * d) as f64;
            if lr - log_top < -46.0 {
                break;
            }
            s += term(d);
            d += dir;
        }
    }
    s
}

/// Numerators of the two diagonal theta factors, sum over d of
/// u^{2d^2} v^{2(d -+ 1)^2} t^{2d -+ 1} zeta^{+-2d}.
fn diag_theta(u: f64, v: f64, t: f64, zeta: C, second: bool) -> C {
    let s = if second { -1.0 } else { 1.0 };
    let lz = zeta.ln() * (2.0 * s);
    if u == 0.0 || v == 0.0 {
        let mut acc = c(0.0);
        for d in -2i64..=2 {
            let e = d as f64 - s;
            let w = u.powi(2 * (d * d) as i32) * v.powi(2 * (e * e) as i32);
            if w != 0.0 {
                acc += (lz * d as f64).exp() * w * t.powf(2.0 * d as f64 - s);
            }
        }
        return acc;
    }
    let (lu, lv, lt) = (u.ln(), v.ln(), t.ln());
    let a = 2.0 * (lu + lv);
    let b = c(-4.0 * s * lv + 2.0 * lt) + lz;
    let c0 = c(2.0 * lv - s * lt);
    gauss_series(a, b, c0)
}

/// theta(x; (uv)^2) with x = u^2 zeta, written so that u = 0 is harmless.
fn theta_u2(u: f64, v: f64, zeta: C) -> C {
    let p2 = (u * v).powi(2);
    qpoch(zeta * (u * u), p2) * qpoch(c(v * v) / zeta, p2)
}

fn theta_p2(x: C, p2: f64) -> C {
    qpoch(x, p2) * qpoch(c(p2) / x, p2)
}

/// Node data on one circle.
#[derive(Debug, Clone)]
struct Ring {
    z: Vec<C>,
    log_z: Vec<C>,
    log_f: Vec<C>,
}

impl Ring {
    fn new(spec: &MeasureSpec, r: f64, n: usize) -> Self {
        let mut z = Vec::with_capacity(n);
        let mut log_z = Vec::with_capacity(n);
        for a in 0..n {
            let th = 2.0 * PI * a as f64 / n as f64;
            let th = if th > PI { th - 2.0 * PI } else { th };
            z.push(C::from_polar(r, th));
            log_z.push(C::new(libm::log(r), th));
        }
        let log_f = z.iter().map(|&x| log_f(spec, x)).collect();
        Self { z, log_z, log_f }
    }
}

/// Coupling R[a, b] = left[a] right[b] diff[(b - a) mod N] sum[(a + b) mod N].
#[derive(Debug, Clone)]
struct Coupling {
    left: Vec<C>,
    right: Vec<C>,
    diff: Vec<C>,
    sum: Vec<C>,
}

impl Coupling {
    /// R B for B given column-major per node: out[a][k] = sum_b R[a, b] B[b][k].
    fn apply<E: Exec>(&self, b: &[Vec<C>], exec: &E) -> Vec<Vec<C>> {
        let n = self.left.len();
        let w = b.first().map_or(0, Vec::len);
        exec.map(n, |a| {
            let mut row = vec![c(0.0); w];
            for (j, bj) in b.iter().enumerate() {
                let r = self.right[j] * self.diff[(j + n - a) % n] * self.sum[(a + j) % n];
                if r == c(0.0) {
                    continue;
                }
                for (o, x) in row.iter_mut().zip(bj) {
                    *o += r * x;
                }
            }
            let l = self.left[a];
            for o in row.iter_mut() {
                *o *= l;
            }
            row
        })
    }
}

/// The kernel of the shifted first row for one measure and one contour.
#[derive(Debug, Clone)]
pub struct FiniteKernel {
    pub spec: MeasureSpec,
    pub contour: Contour,
    ring11: Ring,
    outer: Ring,
    inner: Ring,
    ring22: Ring,
    c11: Coupling,
    c12: Coupling,
    c22: Coupling,
}

impl FiniteKernel {
    pub fn new(spec: &MeasureSpec, contour: Contour) -> Result<Self> {
        spec.validate()?;
        let n = contour.nodes;
        if n < 8 {
            return Err(Error::Invalid("at least 8 contour nodes required"));
        }
        let (u, v, t) = (spec.u, spec.v, spec.t);
        let uv = u * v;
        let p2 = uv * uv;
        let p4 = p2 * p2;
        let norm = theta3(c(t * t), p4)?;
        let c2 = qpoch(c(p2), p2).powi(2);
        let ring11 = Ring::new(spec, contour.r11, n);
        let outer = Ring::new(spec, contour.r, n);
        let inner = Ring::new(spec, contour.r_prime, n);
        let ring22 = Ring::new(spec, contour.r22, n);
        let unit: Vec<C> = (0..n).map(|d| C::from_polar(1.0, 2.0 * PI * d as f64 / n as f64)).collect();

        let p_plain = |z: C| 1.0 / (qpoch(z * u, uv) * qpoch(c(-v) / z, uv));
        let p_prime = |z: C| 1.0 / (qpoch(-z * u, uv) * qpoch(c(v) / z, uv));
        let g = |ring: &Ring| -> Vec<C> { ring.z.iter().map(|&z| g_factor(spec, z)).collect() };
        let (g11, go, gi, g22) = (g(&ring11), g(&outer), g(&inner), g(&ring22));

        let diag_diff: Vec<C> = unit.iter().map(|&e| theta_p2(e, p2)).collect();
        let diag_sum = |r: f64, second: bool| -> Vec<C> {
            unit.iter()
                .map(|&e| {
                    let zeta = e * (r * r);
                    diag_theta(u, v, t, zeta, second) / norm / theta_u2(u, v, zeta)
                })
                .collect()
        };
        let c11 = Coupling {
            left: ring11.z.iter().zip(&g11).map(|(&z, &gz)| p_plain(z) * gz * c2).collect(),
            right: ring11.z.iter().zip(&g11).map(|(&z, &gz)| p_plain(z) * gz).collect(),
            diff: diag_diff.clone(),
            sum: diag_sum(contour.r11, false),
        };
        let c22 = Coupling {
            left: ring22.z.iter().zip(&g22).map(|(&z, &gz)| p_prime(z) / gz * c2).collect(),
            right: ring22.z.iter().zip(&g22).map(|(&z, &gz)| p_prime(z) / gz).collect(),
            diff: diag_diff,
            sum: diag_sum(contour.r22, true),
        };
        // (b - a) indexes w/z = (r'/r) e^{i theta}; the theta3 factor depends on z/w.
        let ratio = contour.r_prime / contour.r;
        let rr = contour.r * contour.r_prime;
        let diff12: Vec<C> = unit
            .iter()
            .map(|&e| {
                let x = e * ratio;
                let th = theta3((t / x).powi(2), p4).unwrap_or(c(f64::NAN));
                th / norm / theta_p2(x, p2)
            })
            .collect();
        let sum12: Vec<C> = unit.iter().map(|&e| theta_u2(u, v, e * rr)).collect();
        let c12 = Coupling {
            left: outer.z.iter().zip(&go).map(|(&z, &gz)| p_plain(z) * gz * c2).collect(),
            right: inner.z.iter().zip(&gi).map(|(&w, &gw)| p_prime(w) / gw).collect(),
            diff: diff12,
            sum: sum12,
        };
        let all = [&c11, &c12, &c22];
        if all.iter().any(|k| k.left.iter().chain(&k.right).chain(&k.diff).chain(&k.sum).any(|x| !x.is_finite())) {
            return Err(Error::Domain("kernel factors not finite on the contours"));
        }
        Ok(Self { spec: *spec, contour, ring11, outer, inner, ring22, c11, c12, c22 })
    }

    /// Node vectors rho^{+-m} exp(s log F(z) + e(m) log z) / N for each lattice point.
    fn nodes(&self, ring: &Ring, ms: &[i64], sign: f64, conj: f64, expo: impl Fn(i64) -> f64) -> Vec<Vec<C>> {
        let n = self.contour.nodes as f64;
        let lr = libm::log(self.contour.rho) * conj;
        ring.log_z
            .iter()
            .zip(&ring.log_f)
            .map(|(&lz, &lf)| ms.iter().map(|&m| (lf * sign + lz * expo(m) + lr * m as f64).exp() / n).collect())
            .collect()
    }

    /// K on the points m + 1/2 for m in `ms`, conjugated by rho^m.
    pub fn blocks<E: Exec>(&self, ms: &[i64], exec: &E) -> KernelBlocks {
        let w = ms.len();
        let a11 = self.nodes(&self.ring11, ms, 1.0, 1.0, |m| -(m as f64 + 1.0));
        let b11 = self.nodes(&self.ring11, ms, 1.0, 1.0, |m| -(m as f64 + 2.0));
        let a12 = self.nodes(&self.outer, ms, 1.0, 1.0, |m| -(m as f64 + 1.0));
        let b12 = self.nodes(&self.inner, ms, -1.0, -1.0, |m| m as f64 + 1.0);
        let a22 = self.nodes(&self.ring22, ms, -1.0, -1.0, |m| m as f64);
        let b22 = self.nodes(&self.ring22, ms, -1.0, -1.0, |m| m as f64 - 1.0);
        let contract = |left: &[Vec<C>], right: Vec<Vec<C>>| {
            let rows = exec.map(w, |i| {
                let mut row = vec![c(0.0); w];
                for (la, ra) in left.iter().zip(&right) {
                    let x = la[i];
                    for (o, y) in row.iter_mut().zip(ra) {
                        *o += x * y;
                    }
                }
                row
            });
            crate::linalg::Mat::from_rows(rows)
        };
        let k11 = contract(&a11, self.c11.apply(&b11, exec));
        let k12 = contract(&a12, self.c12.apply(&b12, exec));
        let k22 = contract(&a22, self.c22.apply(&b22, exec));
        KernelBlocks { k11, k12, k22 }
    }
}

/// Options for turning the kernel into a CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOptions {
    /// Starting number of contour nodes; doubled until self-converged.
    pub nodes: usize,
    pub max_nodes: usize,
    /// Required agreement between successive node counts.
    pub tol: f64,
    /// Kernel entries at the far end of the window must fall below this.
    pub edge_tol: f64,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self { nodes: 256, max_nodes: 1 << 14, tol: 1e-9, edge_tol: 1e-12 }
    }
}

/// Prob(lambda_1 + 2 D_t <= m) for m in lo..=hi, with diagnostics.
#[derive(Debug, Clone)]
pub struct ShiftedLaw {
    pub lo: i64,
    pub cdf: Vec<f64>,
    pub nodes: usize,
    /// Largest change under the last doubling of the node count.
    pub self_convergence: f64,
    /// Largest imaginary part among the gap probabilities.
    pub imag: f64,
    pub window_end: i64,
}

fn gaps_once<E: Exec>(kern: &FiniteKernel, lo: i64, end: i64, exec: &E) -> Result<(Vec<C>, f64)> {
    let ms: Vec<i64> = (lo..=end).collect();
    let blocks = kern.blocks(&ms, exec);
    let edge = blocks.edge_magnitude();
    let tp = blocks.trailing_pfaffians()?;
    Ok((tp, edge))
}

/// The gap probabilities on lo..=hi. The gap at m is pf(J - K) on the points
/// m + 1/2, m + 3/2, ... up to the end of a window grown until the kernel has
/// decayed there.
pub fn shifted_lambda1_cdf<E: Exec>(spec: &MeasureSpec, lo: i64, hi: i64, opts: GapOptions, exec: &E) -> Result<ShiftedLaw> {
    if hi < lo {
        return Err(Error::Invalid("empty range"));
    }
    let span = (hi - lo) as usize + 1;
    let mut nodes = opts.nodes.max(64);
    let mut end = hi + 16;
    let mut prev: Option<Vec<f64>> = None;
    loop {
        let kern = FiniteKernel::new(spec, Contour::for_spec(spec, nodes)?)?;
        let (tp, edge) = gaps_once(&kern, lo, end, exec)?;
        if edge > opts.edge_tol && (end - hi) < 4096 {
            end += (end - lo) / 2 + 8;
            prev = None;
            continue;
        }
        if !edge.is_finite() || tp.iter().any(|x| !x.is_finite()) {
            return Err(Error::Diagnostic { what: "non-finite kernel entries", value: edge, limit: opts.edge_tol });
        }
        let vals: Vec<f64> = tp[..span].iter().map(|x| x.re).collect();
        let imag = tp[..span].iter().map(|x| x.im.abs()).fold(0.0, f64::max);
        if let Some(p) = &prev {
            let diff = p.iter().zip(&vals).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if diff <= opts.tol {
                return Ok(ShiftedLaw { lo, cdf: vals, nodes, self_convergence: diff, imag, window_end: end });
            }
            if nodes * 2 > opts.max_nodes {
                return Err(Error::Diagnostic { what: "contour quadrature not converged", value: diff, limit: opts.tol });
            }
        }
        prev = Some(vals);
        nodes *= 2;
    }
}

/// CDF of lambda_1 on 0..=hi, recovered from the shifted law by removing the
/// theta-distributed shift.
pub fn lambda1_cdf<E: Exec>(spec: &MeasureSpec, hi: i64, opts: GapOptions, exec: &E) -> Result<(DistributionTable, ShiftedLaw)> {
    let law = ThetaShiftLaw::of(spec)?;
    let shifted = shifted_lambda1_cdf(spec, 0, hi, opts, exec)?;
    let f = deconvolve_shift(&shifted.cdf, &law)?;
    Ok((DistributionTable::lattice(0, f)?, shifted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Serial;

    #[test]
    fn plancherel_symmetric_weight() {
        let spec = MeasureSpec::updown(Kind::Plancherel { eps: 2.0 }, 0.5, 0.5);
        let z = C::new(0.3, 1.1);
        let m = 2.0 / (1.0 - 0.25);
        let expect = (z - 1.0 / z) * m;
        assert!((log_f(&spec, z) - expect).norm() < 1e-12);
    }

    #[test]
    fn radii_inside_annulus() {
        let spec = MeasureSpec::updown(Kind::Geometric { q: 0.3, n: 1 }, 0.25, 0.25);
        let c = Contour::for_spec(&spec, 64).unwrap();
        assert!(0.3 < c.r_prime && c.r_prime < c.r && c.r < 1.0 / 0.3);
    }

    #[test]
    fn trailing_gaps_match_full_pfaffian() {
        let spec = MeasureSpec::updown(Kind::Geometric { q: 0.3, n: 1 }, 0.25, 0.25);
        let kern = FiniteKernel::new(&spec, Contour::for_spec(&spec, 128).unwrap()).unwrap();
        let ms: Vec<i64> = (-2..20).collect();
        let blocks = kern.blocks(&ms, &Serial);
        let tp = blocks.trailing_pfaffians().unwrap();
        for i in [0usize, 3, 7] {
            let w = blocks.window(i, blocks.len());
            let direct = crate::linalg::fredholm_pfaffian(&w, None).unwrap();
            assert!((direct - tp[i]).norm() < 1e-10);
        }
    }
}
