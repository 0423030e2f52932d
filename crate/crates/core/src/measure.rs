//! Free-boundary Schur measures on pairs and triples of partitions: weights,
//! partition functions, exact laws of lambda_1 and the theta-distributed shift.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{solve, Mat};
use crate::partition::{count_ssyt, count_syt, to_f64, Partition, PartitionIndex, SkewShape};
use crate::special::theta3;
use crate::table::DistributionTable;
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Pairs mu in lambda; v = 1 and the second specialization is empty.
    Upwards,
    /// Triples mu in lambda contains nu.
    UpDown,
}

/// Boundary label: which free-end weights are switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    AA,
    AB,
    BB,
    Free,
}

impl Label {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "aa" => Some(Label::AA),
            "ab" => Some(Label::AB),
            "bb" => Some(Label::BB),
            "-" | "none" | "free" => Some(Label::Free),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::AA => "aa",
            Label::AB => "ab",
            Label::BB => "bb",
            Label::Free => "-",
        })
    }
}

/// The specialization carried by each step of the process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// H(z) = exp(eps z).
    Plancherel { eps: f64 },
    /// H(z) = (1 - q z)^{-n}.
    Geometric { q: f64, n: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParams {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl Default for BoundaryParams {
    fn default() -> Self {
        Self { a1: 1.0, a2: 1.0, b1: 1.0, b2: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSpec {
    pub variant: Variant,
    pub kind: Kind,
    pub label: Label,
    pub u: f64,
    pub v: f64,
    pub boundary: BoundaryParams,
    /// Parameter of the theta-distributed shift.
    pub t: f64,
}

impl MeasureSpec {
    pub fn updown(kind: Kind, u: f64, v: f64) -> Self {
        Self {
            variant: Variant::UpDown,
            kind,
            label: Label::Free,
            u,
            v,
            boundary: BoundaryParams::default(),
            t: 1.0,
        }
    }

    pub fn upwards(kind: Kind, u: f64) -> Self {
        Self { variant: Variant::Upwards, v: 1.0, ..Self::updown(kind, u, 1.0) }
    }

    pub fn with_label(mut self, label: Label, boundary: BoundaryParams) -> Self {
        self.label = label;
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.u) {
            return Err(Error::Domain("0 <= u < 1 required"));
        }
        match self.variant {
            Variant::Upwards if self.v != 1.0 => {
                return Err(Error::Domain("upwards measures have v = 1"))
            }
            Variant::UpDown if !(0.0..1.0).contains(&self.v) => {
                return Err(Error::Domain("0 <= v < 1 required"))
            }
            _ => {}
        }
        match self.kind {
            Kind::Plancherel { eps } if !(eps >= 0.0 && eps.is_finite()) => {
                return Err(Error::Domain("eps >= 0 required"))
            }
            Kind::Geometric { q, n } if !(0.0..1.0).contains(&q) || n == 0 => {
                return Err(Error::Domain("0 <= q < 1 and n >= 1 required"))
            }
            _ => {}
        }
        let b = &self.boundary;
        if [b.a1, b.a2, b.b1, b.b2].iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
            return Err(Error::Domain("boundary parameters must lie in (0, 1]"));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::Domain("t > 0 required"));
        }
        Ok(())
    }

    /// The theta-law base uv.
    pub fn uv(&self) -> f64 {
        self.u * self.v
    }
}

/// Delta^x(first, second).
pub fn boundary_weight(label: Label, first: &Partition, second: &Partition, b: &BoundaryParams) -> f64 {
    first_factor(label, first, b) * second_factor(label, second, b)
}

fn first_factor(label: Label, p: &Partition, b: &BoundaryParams) -> f64 {
    match label {
        Label::AA | Label::AB => libm::pow(b.a1, p.odd_cols() as f64),
        Label::BB => libm::pow(b.b1, p.odd_rows() as f64),
        Label::Free => 1.0,
    }
}

fn second_factor(label: Label, p: &Partition, b: &BoundaryParams) -> f64 {
    match label {
        Label::AA => libm::pow(b.a2, p.odd_cols() as f64),
        Label::AB | Label::BB => libm::pow(b.b2, p.odd_rows() as f64),
        Label::Free => 1.0,
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| libm::log(k as f64)).sum()
}

/// s_{lambda/mu} at the specialization; zero unless mu is contained in lambda.
pub fn skew_schur(kind: Kind, outer: &Partition, inner: &Partition) -> f64 {
    let Ok(shape) = SkewShape::new(outer.clone(), inner.clone()) else {
        return 0.0;
    };
    let d = shape.size();
    match kind {
        Kind::Plancherel { eps } => {
            if d == 0 {
                return 1.0;
            }
            if eps == 0.0 {
                return 0.0;
            }
            let f = to_f64(&count_syt(&shape));
            libm::exp(d as f64 * libm::log(eps) + libm::log(f) - ln_factorial(d))
        }
        Kind::Geometric { q, n } => libm::pow(q, d as f64) * to_f64(&count_ssyt(n, &shape)),
    }
}

/// Weight of (mu, lambda) or (mu, lambda, nu) before normalization.
pub fn unnormalized_weight(
    spec: &MeasureSpec,
    mu: &Partition,
    lambda: &Partition,
    nu: Option<&Partition>,
) -> f64 {
    let b = &spec.boundary;
    match spec.variant {
        Variant::Upwards => {
            boundary_weight(spec.label, mu, lambda, b)
                * libm::pow(spec.u, mu.size() as f64)
                * skew_schur(spec.kind, lambda, mu)
        }
        Variant::UpDown => {
            let Some(nu) = nu else { return 0.0 };
            boundary_weight(spec.label, mu, nu, b)
                * libm::pow(spec.u, mu.size() as f64)
                * libm::pow(spec.v, nu.size() as f64)
                * skew_schur(spec.kind, lambda, mu)
                * skew_schur(spec.kind, lambda, nu)
        }
    }
}

/// A specialization recorded by power sums: `mult` variables equal to `x`
/// for each pair, plus a Plancherel part.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerSums {
    pub vars: Vec<(f64, f64)>,
    pub eps: f64,
}

impl PowerSums {
    pub fn of(kind: Kind) -> Self {
        match kind {
            Kind::Plancherel { eps } => Self { vars: Vec::new(), eps },
            Kind::Geometric { q, n } => Self { vars: vec![(n as f64, q)], eps: 0.0 },
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { vars: self.vars.iter().map(|&(m, x)| (m, x * c)).collect(), eps: self.eps * c }
    }

    fn max_var(&self) -> f64 {
        self.vars.iter().map(|v| v.1.abs()).fold(0.0, f64::max)
    }

    fn is_zero(&self) -> bool {
        self.eps == 0.0 && self.max_var() == 0.0
    }

    pub fn p(&self, k: u32) -> f64 {
        let mut s: f64 = self.vars.iter().map(|&(m, x)| m * libm::pow(x, k as f64)).sum();
        if k == 1 {
            s += self.eps;
        }
        s
    }
}

/// Number of power-sum terms so that x^k stays above 1e-20.
fn series_len(x: f64) -> u32 {
    if x <= 0.0 {
        1
    } else {
        (libm::ceil(-46.0 / libm::log(x)) as u32).clamp(1, 100_000)
    }
}

/// log H(A; B) = sum_m p_m(A) p_m(B) / m.
fn log_cauchy(a: &PowerSums, b: &PowerSums) -> f64 {
    if a.is_zero() || b.is_zero() {
        return 0.0;
    }
    let kmax = series_len(a.max_var().max(b.max_var()));
    (1..=kmax).map(|m| a.p(m) * b.p(m) / m as f64).sum()
}

/// log sum_lambda s_lambda(X) = sum_k (p_k^2 - p_{2k})/(2k) + p_k/k.
fn log_littlewood(x: &PowerSums) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let kmax = series_len(x.max_var());
    (1..=kmax)
        .map(|k| {
            let pk = x.p(k);
            (pk * pk - x.p(2 * k)) / (2.0 * k as f64) + pk / k as f64
        })
        .sum()
}

/// log of sum over all (mu, lambda, nu) of u^|mu| v^|nu| s_{lambda/mu}(A) s_{lambda/nu}(B),
/// by the reduction (u, v, A, B) -> (uv, 1, u^2 v B, v A).
pub fn log_partition_function(u: f64, v: f64, a: &PowerSums, b: &PowerSums) -> Result<f64> {
    if !(0.0..1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain("partition function diverges"));
    }
    let (mut u, mut v, mut a, mut b) = (u, v, a.clone(), b.clone());
    let mut lz = 0.0;
    for _ in 0..100_000 {
        if a.is_zero() && b.is_zero() {
            break;
        }
        if a.max_var() >= 1.0 || b.max_var() >= 1.0 {
            return Err(Error::Domain("partition function diverges"));
        }
        lz += log_cauchy(&a, &b) + log_littlewood(&b.scaled(u)) + log_littlewood(&a.scaled(v));
        let (na, nb) = (b.scaled(u * u * v), a.scaled(v));
        u *= v;
        v = 1.0;
        a = na;
        b = nb;
        if a.p(1).abs() + b.p(1).abs() < 1e-18 {
            break;
        }
    }
    // remaining factor 1/(c; c)_inf with c = u v
    let c = u * v;
    let mut qc = c;
    while qc > 1e-18 {
        lz -= libm::log1p(-qc);
        qc *= c;
    }
    Ok(lz)
}

/// log of the total label-free weight tilted by t^{|lambda|}.
fn log_tilted_mass(spec: &MeasureSpec, t: f64) -> Result<f64> {
    let plus = PowerSums::of(spec.kind).scaled(t);
    match spec.variant {
        Variant::Upwards => log_partition_function(t * spec.u, 1.0, &plus, &PowerSums::default()),
        Variant::UpDown => log_partition_function(t * spec.u, spec.v, &plus, &PowerSums::of(spec.kind)),
    }
}

/// Bound on the weight of all configurations with |lambda| > cap, as
/// min_t Z(t) t^{-(cap+1)} over admissible tilts. Valid for every label
/// because boundary factors are at most one.
pub fn tail_weight_bound(spec: &MeasureSpec, cap: u32) -> Result<f64> {
    Ok(libm::exp(best_log_tail(spec, |_| cap)?.1))
}

fn tilt_range(spec: &MeasureSpec) -> f64 {
    let mut tmax: f64 = 1e3;
    if spec.u > 0.0 {
        tmax = tmax.min(1.0 / spec.u);
    }
    if let Kind::Geometric { q, .. } = spec.kind {
        if q > 0.0 {
            tmax = tmax.min(1.0 / q);
        }
    }
    tmax
}

/// Scans tilts; `cap_for` maps log Z_t and t to the cap being tested.
fn best_log_tail(spec: &MeasureSpec, cap_for: impl Fn((f64, f64)) -> u32) -> Result<(u32, f64)> {
    let tmax = tilt_range(spec);
    let mut best = (u32::MAX, f64::INFINITY);
    let steps = 240;
    for i in 1..steps {
        let t = libm::exp(libm::log(tmax) * i as f64 / steps as f64);
        let Ok(lz) = log_tilted_mass(spec, t) else { continue };
        let cap = cap_for((lz, t));
        let lb = lz - (cap as f64 + 1.0) * libm::log(t);
        if cap < best.0 || (cap == best.0 && lb < best.1) {
            best = (cap, lb);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::Domain("no admissible tilt"));
    }
    Ok(best)
}

/// Exact law of lambda_1 on 0..=cap with a certified bound on the omitted mass.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactLaw {
    /// Prob(lambda_1 = k) within the enumerated set, normalized to sum to one.
    pub pmf: Vec<f64>,
    /// Upper bound on Prob(|lambda| > cap) under the full measure.
    pub tail_bound: f64,
    pub cap: u32,
    /// Enumerated weight, the truncated partition function.
    pub mass: f64,
}

impl ExactLaw {
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }

    pub fn table(&self) -> DistributionTable {
        DistributionTable::from_pmf(0, &self.pmf).expect("pmf on a nonempty integer grid")
    }
}

/// Smallest cap whose tail bound (with the empty configuration as lower
/// bound on the normalization) is below `tol`.
pub fn choose_cap(spec: &MeasureSpec, tol: f64) -> Result<u32> {
    let (cap, _) = best_log_tail(spec, |(lz, t)| {
        let c = libm::ceil((lz - libm::log(tol)) / libm::log(t)) - 1.0;
        c.clamp(0.0, u32::MAX as f64) as u32
    })?;
    Ok(cap)
}

/// Exact lambda_1 law with an automatically chosen cap.
pub fn lambda1_law_exact(spec: &MeasureSpec, tol: f64) -> Result<ExactLaw> {
    spec.validate()?;
    let cap = choose_cap(spec, tol)?;
    if cap > 80 {
        return Err(Error::Diagnostic { what: "enumeration cap", value: cap as f64, limit: 80.0 });
    }
    let law = lambda1_law_with_cap(spec, cap)?;
    if law.tail_bound > tol {
        return Err(Error::Diagnostic { what: "tail bound", value: law.tail_bound, limit: tol });
    }
    Ok(law)
}

/// Vector of sum_mu c(mu) s_{lambda/mu}(rho) over an enumerated family.
fn transfer(kind: Kind, idx: &PartitionIndex, start: &[f64]) -> Vec<f64> {
    match kind {
        Kind::Geometric { q, n } => {
            let mut cur = start.to_vec();
            let sizes: Vec<u32> = idx.list.iter().map(Partition::size).collect();
            let mut buf = Vec::new();
            for _ in 0..n {
                let mut next = vec![0.0; cur.len()];
                for (li, lam) in idx.list.iter().enumerate() {
                    let mut acc = 0.0;
                    interlacing(lam.parts(), 0, &mut buf, &mut |mu| {
                        let mi = idx.get(mu).expect("family closed under removal");
                        acc += cur[mi] * libm::pow(q, (sizes[li] - sizes[mi]) as f64);
                    });
                    next[li] = acc;
                }
                cur = next;
            }
            cur
        }
        Kind::Plancherel { eps } => {
            let corners: Vec<Vec<usize>> = idx
                .list
                .iter()
                .map(|l| l.remove_corners().iter().map(|c| idx.get(c.parts()).unwrap()).collect())
                .collect();
            let sizes: Vec<u32> = idx.list.iter().map(Partition::size).collect();
            let cap = sizes.iter().copied().max().unwrap_or(0);
            let mut s = start.to_vec();
            let mut total = start.to_vec();
            for d in 1..=cap {
                let mut next = vec![0.0; s.len()];
                for (li, cs) in corners.iter().enumerate() {
                    if sizes[li] < d {
                        continue;
                    }
                    let acc: f64 = cs.iter().map(|&c| s[c]).sum();
                    next[li] = eps / d as f64 * acc;
                }
                for (t, x) in total.iter_mut().zip(&next) {
                    *t += x;
                }
                s = next;
            }
            total
        }
    }
}

/// Calls `f` on every mu with lambda/mu a horizontal strip.
fn interlacing(lam: &[u32], i: usize, buf: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if i == lam.len() {
        f(buf);
        return;
    }
    let lo = lam.get(i + 1).copied().unwrap_or(0);
    for m in lo..=lam[i] {
        buf.push(m);
        interlacing(lam, i + 1, buf, f);
        buf.pop();
    }
}

/// Exact lambda_1 law over configurations with |lambda| <= cap.
pub fn lambda1_law_with_cap(spec: &MeasureSpec, cap: u32) -> Result<ExactLaw> {
    spec.validate()?;
    let idx = PartitionIndex::up_to(cap);
    let b = &spec.boundary;
    let start1: Vec<f64> = idx
        .list
        .iter()
        .map(|m| first_factor(spec.label, m, b) * libm::pow(spec.u, m.size() as f64))
        .collect();
    let a1 = transfer(spec.kind, &idx, &start1);
    let weights: Vec<f64> = match spec.variant {
        Variant::Upwards => idx
            .list
            .iter()
            .zip(&a1)
            .map(|(l, a)| a * second_factor(spec.label, l, b))
            .collect(),
        Variant::UpDown => {
            let start2: Vec<f64> = idx
                .list
                .iter()
                .map(|m| second_factor(spec.label, m, b) * libm::pow(spec.v, m.size() as f64))
                .collect();
            let a2 = transfer(spec.kind, &idx, &start2);
            a1.iter().zip(&a2).map(|(x, y)| x * y).collect()
        }
    };
    let mut pmf = vec![0.0; cap as usize + 1];
    for (l, w) in idx.list.iter().zip(&weights) {
        pmf[l.first() as usize] += w;
    }
    let mass: f64 = pmf.iter().sum();
    for p in pmf.iter_mut() {
        *p /= mass;
    }
    let tail = tail_weight_bound(spec, cap)? / mass;
    Ok(ExactLaw { pmf, tail_bound: tail, cap, mass })
}

/// Prob(D_t = d) proportional to t^{2d} (uv)^{2 d^2}.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaShiftLaw {
    pub t: f64,
    pub uv: f64,
    pub dmin: i64,
    pub pmf: Vec<f64>,
}

impl ThetaShiftLaw {
    pub fn new(t: f64, uv: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&uv) || !(t > 0.0) {
            return Err(Error::Domain("0 <= uv < 1 and t > 0 required"));
        }
        if uv == 0.0 {
            return Ok(Self { t, uv, dmin: 0, pmf: vec![1.0] });
        }
        let (lt, lq) = (libm::log(t), libm::log(uv));
        let logp = |d: i64| 2.0 * d as f64 * lt + 2.0 * (d * d) as f64 * lq;
        let peak = libm::round(-lt / (2.0 * lq)) as i64;
        let top = logp(peak);
        let mut lo = peak;
        while logp(lo - 1) - top > -46.0 {
            lo -= 1;
        }
        let mut hi = peak;
        while logp(hi + 1) - top > -46.0 {
            hi += 1;
        }
        let mut pmf: Vec<f64> = (lo..=hi).map(|d| libm::exp(logp(d) - top)).collect();
        let s: f64 = pmf.iter().sum();
        for p in pmf.iter_mut() {
            *p /= s;
        }
        Ok(Self { t, uv, dmin: lo, pmf })
    }

    pub fn of(spec: &MeasureSpec) -> Result<Self> {
        Self::new(spec.t, spec.uv())
    }

    pub fn prob(&self, d: i64) -> f64 {
        let i = d - self.dmin;
        if i < 0 {
            0.0
        } else {
            self.pmf.get(i as usize).copied().unwrap_or(0.0)
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.pmf.iter().enumerate().map(|(i, &p)| (self.dmin + i as i64, p))
    }

    /// Normalizing constant theta3(t^2; (uv)^4), for checking the series.
    pub fn normalizer(&self) -> Result<f64> {
        Ok(theta3(Complex64::new(self.t * self.t, 0.0), libm::pow(self.uv, 4.0))?.re)
    }
}

/// Law of lambda_1 + 2 D_t on lo..=hi, from a lattice CDF of lambda_1.
pub fn convolve_shift(table: &DistributionTable, law: &ThetaShiftLaw, lo: i64, hi: i64) -> Result<DistributionTable> {
    let vals = (lo..=hi)
        .map(|m| law.support().map(|(d, p)| p * table.at_int(m - 2 * d)).sum())
        .collect();
    DistributionTable::lattice(lo, vals)
}

/// Inverts the shift: given G(m) = Prob(lambda_1 + 2 D_t <= m) for m = 0..len,
/// recovers Prob(lambda_1 <= m) on the same range, taking it to be 0 below 0 and
/// 1 past the window.
pub fn deconvolve_shift(shifted: &[f64], law: &ThetaShiftLaw) -> Result<Vec<f64>> {
    let n = shifted.len();
    let mut a = Mat::zeros(n);
    let mut rhs = shifted.to_vec();
    for i in 0..n {
        for (d, p) in law.support() {
            let j = i as i64 - 2 * d;
            if j >= n as i64 {
                rhs[i] -= p;
            } else if j >= 0 {
                a[(i, j as usize)] += p;
            }
        }
    }
    solve(&a, &rhs)
}

/// Prob(lambda_1 <= k) = (q; q)_inf / (q; q)_k for lambda uniform with weight q^|lambda|.
pub fn uniform_first_part_cdf(q: f64, k: u32) -> f64 {
    let mut p = 1.0;
    let mut qj = libm::pow(q, k as f64 + 1.0);
    while qj > 1e-18 {
        p *= 1.0 - qj;
        qj *= q;
    }
    p
}
