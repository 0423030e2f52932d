//! Hypergeometric Airy kernels, their Fredholm pfaffians, the Tracy-Widom
//! baselines and the critical scalings.
//!
//! Every kernel block is a double integral over vertical lines, discretized by
//! a truncated trapezoid rule and assembled as e^T R e with per-node vectors e
//! and a dense coupling R built from sine and cosine ratios.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C;

use crate::exec::Exec;
use crate::linalg::{det, fredholm_pfaffian, KernelBlocks, Mat};
use crate::measure::Label;
use crate::quad::{gauss_legendre, VerticalLine};
use crate::special::{airy, ln_gamma};
use crate::{Error, Result};

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

fn lg(z: C) -> Result<C> {
    ln_gamma(z)
}

/// The Gamma ratios attached to the boundary parameters, for k = 1 or 2.
pub fn gamma_ratio(k: u8, zeta: C, alpha1: f64, alpha2: f64, eta: f64) -> Result<C> {
    let (num, den) = match k {
        1 => {
            let e = 2.0 * eta;
            (
                lg(0.5 + (alpha1 - zeta) / e)? + lg(1.0 + (alpha2 - zeta) / e)?,
                lg(0.5 + (alpha1 + zeta) / e)? + lg((alpha2 + zeta) / e)?,
            )
        }
        2 => {
            let e = 4.0 * eta;
            (
                lg(0.25 + (alpha1 - zeta) / e)? + lg(0.75 + (alpha2 - zeta) / e)?,
                lg(0.75 + (alpha1 + zeta) / e)? + lg(0.25 + (alpha2 + zeta) / e)?,
            )
        }
        _ => return Err(Error::Invalid("k must be 1 or 2")),
    };
    Ok((num - den).exp())
}

/// Which kernel: the full one with boundary parameters, or the simplified one
/// obtained when both go to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Full { alpha1: f64, alpha2: f64 },
    Simplified,
}

/// Where F is read relative to the argument of the simplified kernel's
/// pfaffian: pf(J - A) on (s + sign * log 2 / (k eta), inf).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitParams {
    pub k: u8,
    pub family: Family,
    pub eta: f64,
    /// Abscissa of the zeta lines of the (1,1) and (1,2) blocks.
    pub tau: f64,
    /// Distance of the omega lines (and of both (2,2) lines) left of the axis.
    pub tau_prime: f64,
    /// Vertical truncation and step of the trapezoid rule.
    pub t_max: f64,
    pub step: f64,
    /// Convention for the simplified kernels.
    pub shift: ShiftSign,
}

impl LimitParams {
    pub fn new(k: u8, family: Family, eta: f64) -> Result<Self> {
        let tau = default_abscissa(eta);
        let mut p = Self { k, family, eta, tau, tau_prime: tau, t_max: 0.0, step: 0.0, shift: ShiftSign::Minus };
        p.set_abscissas(tau, tau)?;
        Ok(p)
    }

    /// The kernel a label collapses to: aa keeps both parameters, ab drops the
    /// second, bb and the free label give the simplified kernel.
    pub fn for_label(k: u8, label: Label, alpha1: f64, alpha2: f64, eta: f64) -> Result<Self> {
        let family = match label {
            Label::AA => Family::Full { alpha1, alpha2 },
            Label::AB => Family::Full { alpha1, alpha2: 0.0 },
            Label::BB | Label::Free => Family::Simplified,
        };
        Self::new(k, family, eta)
    }

    /// Moves the contours; the truncation follows the abscissa.
    pub fn set_abscissas(&mut self, tau: f64, tau_prime: f64) -> Result<()> {
        self.tau = tau;
        self.tau_prime = tau_prime;
        self.t_max = libm::sqrt(40.0 / tau.min(tau_prime));
        self.step = 2.0 * PI * tau.min(tau_prime) / 45.0;
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.k != 1 && self.k != 2 {
            return Err(Error::Invalid("k must be 1 or 2"));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::Domain("eta > 0 required"));
        }
        if let Family::Full { alpha1, alpha2 } = self.family {
            if !(alpha1 >= 0.0 && alpha2 >= 0.0 && alpha1.is_finite() && alpha2.is_finite()) {
                return Err(Error::Domain("alpha parameters must be finite and nonnegative"));
            }
            if self.k == 1 && (alpha2 - self.tau_prime).abs() < 1e-3 {
                return Err(Error::Domain("omega line passes through a Gamma pole"));
            }
        }
        let (t, tp) = (self.tau, self.tau_prime);
        // the lines must avoid the poles of the Gamma factors at +-eta and of
        // the trigonometric couplings at zeta + omega = 2 eta Z
        if !(t > 0.0 && tp > 0.0 && t < self.eta && tp < self.eta) {
            return Err(Error::Domain("contour abscissas must lie in (0, eta)"));
        }
        Ok(())
    }

    /// log 2 / (k eta).
    pub fn log2_shift(&self) -> f64 {
        core::f64::consts::LN_2 / (self.k as f64 * self.eta)
    }

    /// Left end of the half-line on which F(s) is a Fredholm pfaffian.
    pub fn window_start(&self, s: f64) -> f64 {
        match (self.family, self.shift) {
            (Family::Full { .. }, _) | (Family::Simplified, ShiftSign::Plus) => s + self.log2_shift(),
            (Family::Simplified, ShiftSign::Minus) => s - self.log2_shift(),
        }
    }
}

fn default_abscissa(eta: f64) -> f64 {
    (0.5f64).min(eta / 2.0)
}

/// Discretized limit kernel: node data on the lines Re = tau and Re = -tau'.
#[derive(Debug, Clone)]
pub struct LimitKernel {
    pub params: LimitParams,
    right: Vec<C>,
    left: Vec<C>,
    weight: f64,
    f1: Vec<C>,
    f2: Vec<C>,
    r11: Mat<C>,
    r12: Mat<C>,
    r22: Mat<C>,
    consts: [f64; 3],
    /// Residue at omega = -alpha2 when that pole lies right of the omega line.
    residue: Option<(f64, C)>,
}

fn sin_ratio(k: u8, eta: f64, a: C, b: C) -> C {
    // (1,1)/(2,2) coupling
    match k {
        1 => (PI * (a - b) / (2.0 * eta)).sin() / (PI * (a + b) / (2.0 * eta)).sin(),
        _ => (PI * (a - b) / (4.0 * eta)).sin() / (PI * (a + b) / (4.0 * eta)).cos(),
    }
}

fn cross_ratio(k: u8, eta: f64, a: C, b: C) -> C {
    match k {
        1 => (PI * (a + b) / (2.0 * eta)).sin() / (PI * (a - b) / (2.0 * eta)).sin(),
        _ => (PI * (a + b) / (4.0 * eta)).cos() / (PI * (a - b) / (4.0 * eta)).sin(),
    }
}

impl LimitKernel {
    pub fn new(params: LimitParams) -> Result<Self> {
        params.validate()?;
        let (k, eta) = (params.k, params.eta);
        let rl = VerticalLine::new(params.tau, params.t_max, params.step);
        let ll = VerticalLine::new(-params.tau_prime, params.t_max, params.step);
        let weight = rl.weight;
        let (right, left) = (rl.nodes, ll.nodes);
        let f1 = |z: C| -> Result<C> {
            Ok(match (k, params.family) {
                (1, Family::Full { alpha1, alpha2 }) => lg(z / eta)?.exp() * gamma_ratio(1, z, alpha1, alpha2, eta)?,
                (_, Family::Full { alpha1, alpha2 }) => {
                    lg(0.5 + z / (2.0 * eta))?.exp() * gamma_ratio(2, z, alpha1, alpha2, eta)?
                }
                (1, Family::Simplified) => lg(1.0 - z / eta)?.exp(),
                (_, Family::Simplified) => lg(0.5 - z / (2.0 * eta))?.exp(),
            })
        };
        let f2 = |w: C| -> Result<C> {
            Ok(match (k, params.family) {
                (1, Family::Full { alpha1, alpha2 }) => {
                    let e = 2.0 * eta;
                    (lg(1.0 - w / eta)? + lg(0.5 + (alpha1 + w) / e)? + lg((alpha2 + w) / e)?
                        - lg(0.5 + (alpha1 - w) / e)?
                        - lg(1.0 + (alpha2 - w) / e)?)
                        .exp()
                }
                (_, Family::Full { alpha1, alpha2 }) => {
                    lg(0.5 - w / (2.0 * eta))?.exp() / gamma_ratio(2, w, alpha1, alpha2, eta)?
                }
                (1, Family::Simplified) => lg(w / eta)?.exp(),
                (_, Family::Simplified) => lg(0.5 + w / (2.0 * eta))?.exp(),
            })
        };
        let f1v = right.iter().map(|&z| f1(z)).collect::<Result<Vec<_>>>()?;
        let f2v = left.iter().map(|&w| f2(w)).collect::<Result<Vec<_>>>()?;
        let n = right.len();
        let r11 = Mat::from_fn(n, |a, b| if a == b { c(0.0) } else { sin_ratio(k, eta, right[a], right[b]) });
        let r22 = Mat::from_fn(n, |a, b| if a == b { c(0.0) } else { sin_ratio(k, eta, left[a], left[b]) });
        let r12 = Mat::from_fn(n, |a, b| cross_ratio(k, eta, right[a], left[b]));
        let consts = match (k, params.family) {
            (1, Family::Full { .. }) => [1.0, 1.0 / (2.0 * eta), 1.0 / (4.0 * eta * eta)],
            (1, Family::Simplified) => [0.25, 1.0 / (2.0 * eta), 1.0 / (eta * eta)],
            _ => [1.0 / (4.0 * eta); 3],
        };
        let residue = match (k, params.family) {
            (1, Family::Full { alpha1, alpha2 }) if alpha2 < params.tau_prime => {
                let e = 2.0 * eta;
                let rho = 2.0 * eta * (lg(c(0.5 + (alpha1 - alpha2) / e))? - lg(c(0.5 + (alpha1 + alpha2) / e))?).exp();
                Some((alpha2, rho))
            }
            _ => None,
        };
        let all_finite = f1v.iter().chain(&f2v).all(|z| z.is_finite());
        if !all_finite {
            return Err(Error::Domain("Gamma factors overflow on the contours"));
        }
        Ok(Self { params, right, left, weight, f1: f1v, f2: f2v, r11, r12, r22, consts, residue })
    }

    pub fn nodes(&self) -> usize {
        self.right.len()
    }

    /// Kernel blocks at the points xs.
    pub fn blocks<E: Exec>(&self, xs: &[f64], exec: &E) -> KernelBlocks {
        let (k, eta) = (self.params.k, self.params.eta);
        let m = xs.len();
        let h = self.weight;
        // e1[a][i] = f1(zeta_a) exp(zeta^3/3 - x_i zeta) h; e2 likewise with the signs flipped.
        let e1: Vec<Vec<C>> = self
            .right
            .iter()
            .zip(&self.f1)
            .map(|(&z, &f)| xs.iter().map(|&x| f * (z * z * z / 3.0 - z * x).exp() * h).collect())
            .collect();
        let e2: Vec<Vec<C>> = self
            .left
            .iter()
            .zip(&self.f2)
            .map(|(&w, &f)| xs.iter().map(|&x| f * (-w * w * w / 3.0 + w * x).exp() * h).collect())
            .collect();
        let sandwich = |l: &[Vec<C>], r: &Mat<C>, rr: &[Vec<C>], scale: f64| -> Mat<C> {
            let n = l.len();
            // rb[a][j] = sum_b R[a, b] rr[b][j]
            let rb: Vec<Vec<C>> = exec.map(n, |a| {
                let mut row = vec![c(0.0); m];
                for (b, v) in rr.iter().enumerate() {
                    let x = r[(a, b)];
                    for (o, y) in row.iter_mut().zip(v) {
                        *o += x * y;
                    }
                }
                row
            });
            let rows = exec.map(m, |i| {
                let mut row = vec![c(0.0); m];
                for (la, ra) in l.iter().zip(&rb) {
                    let x = la[i] * scale;
                    for (o, y) in row.iter_mut().zip(ra) {
                        *o += x * y;
                    }
                }
                row
            });
            Mat::from_rows(rows)
        };
        let k11 = sandwich(&e1, &self.r11, &e1, self.consts[0]);
        let mut k12 = sandwich(&e1, &self.r12, &e2, self.consts[1]);
        let mut k22 = sandwich(&e2, &self.r22, &e2, self.consts[2]);
        let sum_cols = |e: &[Vec<C>]| -> Vec<C> {
            (0..m).map(|i| e.iter().map(|v| v[i]).sum()).collect()
        };
        match (k, self.params.family) {
            (1, Family::Simplified) => {
                // omega contour of (1,2) passes right of 0: add the residue there
                let res = sum_cols(&e1);
                let single = sum_cols(&e2);
                for i in 0..m {
                    for j in 0..m {
                        k12[(i, j)] += res[i] * 0.5;
                        k22[(i, j)] += (single[i] - single[j]) / eta - sgn(xs[i] - xs[j]);
                    }
                }
            }
            (1, Family::Full { .. }) => {
                if let Some((a2, rho)) = self.residue {
                    let pole = c(-a2);
                    let e2p: Vec<C> = xs.iter().map(|&y| (-pole * pole * pole / 3.0 + pole * y).exp()).collect();
                    let s12: Vec<C> = (0..m)
                        .map(|i| {
                            self.right.iter().zip(&e1).map(|(&z, v)| cross_ratio(1, eta, z, pole) * v[i]).sum()
                        })
                        .collect();
                    let s22: Vec<C> = (0..m)
                        .map(|i| self.left.iter().zip(&e2).map(|(&z, v)| sin_ratio(1, eta, z, pole) * v[i]).sum())
                        .collect();
                    for i in 0..m {
                        for j in 0..m {
                            k12[(i, j)] += rho * self.consts[1] * e2p[j] * s12[i];
                            k22[(i, j)] += rho * self.consts[2] * (e2p[j] * s22[i] - e2p[i] * s22[j]);
                        }
                    }
                }
                for i in 0..m {
                    for j in 0..m {
                        k22[(i, j)] -= c(sgn(xs[i] - xs[j]));
                    }
                }
            }
            _ => {}
        }
        KernelBlocks { k11, k12, k22 }
    }

    /// pf(J - A) on (a, a + length) by m-point Gauss-Legendre.
    pub fn gap<E: Exec>(&self, a: f64, length: f64, m: usize, exec: &E) -> Result<C> {
        let (x, w) = gauss_legendre(m, a, a + length);
        let blocks = self.blocks(&x, exec);
        fredholm_pfaffian(&blocks, Some(&w))
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Fredholm quadrature settings for CDF evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapQuadrature {
    pub nodes: usize,
    pub length: f64,
}

impl Default for GapQuadrature {
    fn default() -> Self {
        Self { nodes: 40, length: 12.0 }
    }
}

/// The limiting CDF at each s, with the largest imaginary residue seen.
pub fn limit_cdf<E: Exec>(params: &LimitParams, s: &[f64], quad: GapQuadrature, exec: &E) -> Result<(Vec<f64>, f64)> {
    let kern = LimitKernel::new(*params)?;
    let mut out = Vec::with_capacity(s.len());
    let mut imag: f64 = 0.0;
    for &x in s {
        let v = kern.gap(params.window_start(x), quad.length, quad.nodes, exec)?;
        imag = imag.max(v.im.abs());
        out.push(v.re);
    }
    Ok((out, imag))
}

/// Tracy-Widom GUE: det(I - K_Airy) on (s, s + length).
pub fn f_gue(s: f64, quad: GapQuadrature) -> f64 {
    let (x, w) = gauss_legendre(quad.nodes, s, s + quad.length);
    let ai: Vec<(f64, f64)> = x.iter().map(|&t| airy(t)).collect();
    let m = x.len();
    let a = Mat::from_fn(m, |i, j| {
        let k = if i == j {
            ai[i].1 * ai[i].1 - x[i] * ai[i].0 * ai[i].0
        } else {
            (ai[i].0 * ai[j].1 - ai[i].1 * ai[j].0) / (x[i] - x[j])
        };
        let v = if i == j { 1.0 } else { 0.0 } - libm::sqrt(w[i] * w[j]) * k;
        c(v)
    });
    det(&a).re
}

/// Tracy-Widom GOE: det(I - Ai(x + y + s)) on (0, length).
pub fn f_goe(s: f64, quad: GapQuadrature) -> f64 {
    let (x, w) = gauss_legendre(quad.nodes, 0.0, quad.length);
    let m = x.len();
    let a = Mat::from_fn(m, |i, j| {
        let v = if i == j { 1.0 } else { 0.0 } - libm::sqrt(w[i] * w[j]) * airy(x[i] + x[j] + s).0;
        c(v)
    });
    det(&a).re
}

/// chi = 2 q sum_{l >= 0} u^{2l} / (1 - u^{2l} q).
pub fn chi(u: f64, q: f64) -> f64 {
    if q == 0.0 {
        return 0.0;
    }
    let u2 = u * u;
    let mut s = 0.0;
    let mut p = 1.0;
    loop {
        let t = p / (1.0 - p * q);
        s += t;
        p *= u2;
        // remaining terms are at most p / ((1 - q)(1 - u^2))
        if p / ((1.0 - q) * (1.0 - u2)) < 1e-16 * s || p == 0.0 {
            return 2.0 * q * s;
        }
    }
}

/// Which side of the critical scaling: Poisson (size M) or geometric (size n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingMap {
    /// Size parameter, M or n.
    pub size: f64,
    /// Center, 2M or chi n.
    pub center: f64,
    pub eta: f64,
    pub k: u8,
}

/// Parameters (u, eps) with M = eps / (1 - u^2) and u = exp(-eta M^{-1/3}).
pub fn poisson_regime(m: f64, eta: f64) -> (f64, f64) {
    let u = libm::exp(-eta * libm::pow(m, -1.0 / 3.0));
    (u, m * (1.0 - u * u))
}

/// Parameters (u, q) with u = exp(-eta n^{-1/3}) and q = 1 - u^2.
pub fn geometric_regime(n: f64, eta: f64) -> (f64, f64) {
    let u = libm::exp(-eta * libm::pow(n, -1.0 / 3.0));
    (u, 1.0 - u * u)
}

/// a = u^{alpha / eta}.
pub fn boundary_from_exponent(u: f64, alpha: f64, eta: f64) -> f64 {
    libm::pow(u, alpha / eta)
}

impl ScalingMap {
    pub fn poisson(m: f64, eta: f64, k: u8) -> Self {
        Self { size: m, center: 2.0 * m, eta, k }
    }

    pub fn geometric(n: f64, eta: f64, k: u8) -> Self {
        let (u, q) = geometric_regime(n, eta);
        Self { size: n, center: chi(u, q) * n, eta, k }
    }

    fn correction(&self) -> f64 {
        let ke = self.k as f64 * self.eta;
        let c = libm::cbrt(self.size);
        libm::log(c / ke) / ke
    }

    /// Value of lambda_1 corresponding to the rescaled variable s.
    pub fn threshold(&self, s: f64) -> f64 {
        self.center + libm::cbrt(self.size) * (s + self.correction())
    }

    /// Inverse of `threshold`.
    pub fn rescale(&self, lambda1: f64) -> f64 {
        (lambda1 - self.center) / libm::cbrt(self.size) - self.correction()
    }
}
