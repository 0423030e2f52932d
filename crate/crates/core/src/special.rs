//! Complex log-Gamma, q-Pochhammer symbols, theta functions and the Airy
//! function by contour quadrature.

use core::f64::consts::PI;

use num_complex::Complex64 as C;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

fn is_nonpositive_integer(z: C) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == libm::round(z.re)
}

fn ln_gamma_right(z: C) -> C {
    let tmp = z + LANCZOS_G;
    let tmp = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = C::new(0.999_999_999_999_997_092, 0.0);
    let mut y = z;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    tmp + (2.506_628_274_631_000_5 * ser / z).ln()
}

/// log sin(pi z), stable for large |Im z|.
fn ln_sin_pi(z: C) -> C {
    let i = C::i();
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    // sin(pi z) = (e^{i pi z} - e^{-i pi z}) / 2i; keep the dominant exponential.
    if z.im > 0.0 {
        i * PI - i * PI * z + (1.0 - (2.0 * i * PI * z).exp()).ln() - (2.0 * i).ln()
    } else {
        i * PI * z + (1.0 - (-2.0 * i * PI * z).exp()).ln() - (2.0 * i).ln()
    }
}

/// log Gamma(z), equal to the principal branch modulo 2 pi i.
pub fn ln_gamma(z: C) -> Result<C> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole);
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        Ok(C::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_right(1.0 - z))
    }
}

pub fn gamma(z: C) -> Result<C> {
    ln_gamma(z).map(|l| l.exp())
}

/// 1/Gamma(z), entire; exact zeros at the nonpositive integers.
pub fn rgamma(z: C) -> C {
    if is_nonpositive_integer(z) {
        return C::new(0.0, 0.0);
    }
    if z.re >= 0.5 {
        (-ln_gamma_right(z)).exp()
    } else {
        ln_gamma_right(1.0 - z).exp() * (z * PI).sin() / PI
    }
}

/// (x; q)_inf with the tail cut once |x| |q|^L / (1 - |q|) < 1e-17.
pub fn q_pochhammer(x: C, q: C) -> Result<C> {
    let aq = q.norm();
    if aq >= 1.0 {
        return Err(Error::Domain("|q| < 1 required"));
    }
    let ax = x.norm();
    let mut prod = C::new(1.0, 0.0);
    let mut term = x;
    let mut mag = ax;
    while mag / (1.0 - aq) >= 1e-17 {
        prod *= 1.0 - term;
        term *= q;
        mag *= aq;
        if mag == 0.0 {
            break;
        }
    }
    Ok(prod)
}

/// Real-base shorthand used throughout the kernels.
pub fn qpoch(x: C, q: f64) -> C {
    debug_assert!((0.0..1.0).contains(&q));
    let mut prod = C::new(1.0, 0.0);
    let ax = x.norm();
    if ax == 0.0 {
        return prod;
    }
    let mut term = x;
    let mut mag = ax;
    loop {
        prod *= 1.0 - term;
        mag *= q;
        if mag / (1.0 - q) < 1e-17 {
            return prod;
        }
        term *= q;
    }
}

/// theta_q(x) = (x; q)_inf (q/x; q)_inf.
pub fn theta_q(x: C, q: f64) -> Result<C> {
    if x.norm() == 0.0 {
        return Err(Error::Domain("theta_q needs x != 0"));
    }
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Domain("0 <= q < 1 required"));
    }
    Ok(qpoch(x, q) * qpoch(q / x, q))
}

/// theta3(z; q) = sum_d q^{d^2/2} z^d.
pub fn theta3(z: C, q: f64) -> Result<C> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("theta3 needs z != 0"));
    }
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Domain("0 <= q < 1 required"));
    }
    if q == 0.0 {
        return Ok(C::new(1.0, 0.0));
    }
    let lq = q.ln();
    let lz = z.ln();
    let term = |d: i64| -> C { (lz * d as f64 + 0.5 * lq * (d * d) as f64).exp() };
    // peak of |term| sits near d = -ln|z| / ln q
    let peak = -lz.re / lq;
    let mut sum = C::new(0.0, 0.0);
    let mut biggest: f64 = 0.0;
    for sign in [1i64, -1] {
        let mut d = if sign > 0 { 0 } else { -1 };
        loop {
            let t = term(d);
            sum += t;
            biggest = biggest.max(t.norm());
            let past = if sign > 0 { d as f64 > peak } else { (d as f64) < peak };
            if past && t.norm() < 1e-18 * biggest {
                break;
            }
            d += sign;
        }
    }
    Ok(sum)
}

/// Product form of theta3, kept as an independent check of the series.
pub fn theta3_product(z: C, q: f64) -> Result<C> {
    let sq = q.sqrt();
    Ok(qpoch(C::new(q, 0.0), q) * theta_q(-z * sq, q)?)
}

/// -pi^2/(6r) + (1/2 - c) log r + (1/2) log 2pi - log Gamma(c), the small-r
/// expansion of log (q^c; q)_inf with q = e^{-r}.
pub fn log_qpoch_asymptotic(c: C, r: f64) -> Result<C> {
    if r <= 0.0 {
        return Err(Error::Domain("r > 0 required"));
    }
    let lg = ln_gamma(c)?;
    Ok(C::new(-PI * PI / (6.0 * r) + 0.5 * (2.0 * PI).ln(), 0.0) + (0.5 - c) * r.ln() - lg)
}

/// Ai(x) and Ai'(x) from the vertical-line representation
/// Ai(x) = (2 pi i)^{-1} int exp(z^3/3 - x z) dz, Re z = c > 0.
pub fn airy(x: f64) -> (f64, f64) {
    let c = if x > 1.0 { x.sqrt() } else { 1.0 / (1.0 + x.abs()).sqrt() };
    let t_max = (45.0 / c).sqrt() + 1.0;
    let h = 0.02_f64.min(0.5 / (1.0 + x.abs()).sqrt());
    let steps = (t_max / h).ceil() as usize;
    let f = |y: f64| -> (C, C) {
        let z = C::new(c, y);
        let e = (z * z * z / 3.0 - x * z).exp();
        (e, -z * e)
    };
    let (a0, d0) = f(0.0);
    let (mut a, mut d) = (a0.re, d0.re);
    for k in 1..=steps {
        let (ak, dk) = f(k as f64 * h);
        a += 2.0 * ak.re;
        d += 2.0 * dk.re;
    }
    (a * h / (2.0 * PI), d * h / (2.0 * PI))
}
