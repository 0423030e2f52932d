//! Integer partitions, skew shapes, tableau counts and the q-uniform sampler.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::{Error, Result};

/// Weakly decreasing positive parts; the empty list is the empty partition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Trailing zeros are dropped; anything else out of order is an error.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::Invalid("parts must be weakly decreasing"));
        }
        Ok(Self(parts))
    }

    /// Builds from multiplicities: `mult[j - 1]` copies of part `j`.
    pub fn from_multiplicities(mult: &[u32]) -> Self {
        let mut parts = Vec::new();
        for (j, &m) in mult.iter().enumerate().rev() {
            parts.extend(core::iter::repeat_n(j as u32 + 1, m as usize));
        }
        Self(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// |lambda|.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// lambda_1, zero for the empty partition.
    pub fn first(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    /// lambda_i with 0-based i, zero past the end.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Self {
        let mut cols = vec![0u32; self.first() as usize];
        for &p in &self.0 {
            for c in cols.iter_mut().take(p as usize) {
                *c += 1;
            }
        }
        Self(cols)
    }

    pub fn odd_rows(&self) -> u32 {
        self.0.iter().filter(|&&p| p % 2 == 1).count() as u32
    }

    /// Number of odd columns, computed without building the conjugate.
    pub fn odd_cols(&self) -> u32 {
        // column c has length #{i : lambda_i >= c}; it changes only at part values
        let mut count = 0;
        let len = self.0.len();
        for i in 0..len {
            let hi = self.0[i];
            let lo = self.part(i + 1);
            // columns lo+1..=hi have length i+1
            if (i + 1) % 2 == 1 {
                count += hi - lo;
            }
        }
        count
    }

    pub fn contains(&self, inner: &Partition) -> bool {
        inner.len() <= self.len() && inner.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    /// Partitions obtained by removing one corner box.
    pub fn remove_corners(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            if self.0[i] > self.part(i + 1) {
                let mut p = self.0.clone();
                p[i] -= 1;
                if p[i] == 0 {
                    p.pop();
                }
                out.push(Self(p));
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewShape {
    outer: Partition,
    inner: Partition,
}

impl SkewShape {
    pub fn new(outer: Partition, inner: Partition) -> Result<Self> {
        if !outer.contains(&inner) {
            return Err(Error::Shape);
        }
        Ok(Self { outer, inner })
    }

    pub fn straight(outer: Partition) -> Self {
        Self { outer, inner: Partition::empty() }
    }

    pub fn outer(&self) -> &Partition {
        &self.outer
    }

    pub fn inner(&self) -> &Partition {
        &self.inner
    }

    pub fn size(&self) -> u32 {
        self.outer.size() - self.inner.size()
    }

    /// Entries lambda_i - i - mu_j + j of the Jacobi-Trudi matrix.
    fn jt_offsets(&self) -> Vec<Vec<i64>> {
        let l = self.outer.len();
        (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| {
                        self.outer.part(i) as i64 - i as i64 - self.inner.part(j) as i64 + j as i64
                    })
                    .collect()
            })
            .collect()
    }
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exact determinant by fraction-free (Bareiss) elimination.
fn bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// f^{lambda/mu}: standard Young tableaux of a skew shape, via
/// N! det[1/(lambda_i - mu_j - i + j)!].
pub fn count_syt(shape: &SkewShape) -> BigUint {
    let offs = shape.jt_offsets();
    let l = offs.len();
    if l == 0 {
        return BigUint::one();
    }
    // scale row i by D_i! so every entry D_i!/a! is an integer
    let mut scale = BigUint::one();
    let mut rows = Vec::with_capacity(l);
    for row in &offs {
        let d = row.iter().copied().max().unwrap_or(0).max(0) as u64;
        let fd = factorial(d);
        rows.push(
            row.iter()
                .map(|&a| {
                    if a < 0 {
                        BigInt::zero()
                    } else {
                        BigInt::from_biguint(Sign::Plus, &fd / factorial(a as u64))
                    }
                })
                .collect(),
        );
        scale *= fd;
    }
    let det = bareiss(rows);
    let num = det * BigInt::from_biguint(Sign::Plus, factorial(shape.size() as u64));
    let scale = BigInt::from_biguint(Sign::Plus, scale);
    debug_assert!((&num % &scale).is_zero());
    (num / scale).abs().to_biguint().unwrap_or_default()
}

/// h_a(1^n) = C(n + a - 1, a).
fn h_ones(n: u64, a: i64) -> BigUint {
    if a < 0 {
        BigUint::zero()
    } else if a == 0 {
        BigUint::one()
    } else if n == 0 {
        BigUint::zero()
    } else {
        binomial(n + a as u64 - 1, a as u64)
    }
}

/// Semistandard tableaux of a skew shape with entries in 1..=n.
pub fn count_ssyt(n: u32, shape: &SkewShape) -> BigUint {
    let rows = shape
        .jt_offsets()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|a| BigInt::from_biguint(Sign::Plus, h_ones(n as u64, a)))
                .collect()
        })
        .collect();
    let d = bareiss(rows);
    d.to_biguint().unwrap_or_default()
}

pub fn to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Partitions of exactly `k`, parts in reverse lexicographic order.
pub fn partitions_of(k: u32) -> Vec<Partition> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out
}

/// Every partition of weight at most `max_weight`, grouped by weight.
pub fn enumerate_partitions(max_weight: u32) -> Vec<Partition> {
    (0..=max_weight).flat_map(partitions_of).collect()
}

/// Index of an enumerated family, for lookups by shape.
#[derive(Debug, Clone)]
pub struct PartitionIndex {
    pub list: Vec<Partition>,
    map: BTreeMap<Vec<u32>, usize>,
}

impl PartitionIndex {
    pub fn up_to(max_weight: u32) -> Self {
        let list = enumerate_partitions(max_weight);
        let map = list.iter().enumerate().map(|(i, p)| (p.0.clone(), i)).collect();
        Self { list, map }
    }

    pub fn get(&self, parts: &[u32]) -> Option<usize> {
        let mut end = parts.len();
        while end > 0 && parts[end - 1] == 0 {
            end -= 1;
        }
        self.map.get(&parts[..end]).copied()
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

/// Inverse-transform Geom(z): P(X = k) = (1 - z) z^k.
pub fn geom_from_uniform(z: f64, u: f64) -> u32 {
    if z <= 0.0 {
        return 0;
    }
    // u in (0, 1]; P(X >= k) = z^k
    let k = libm::floor(libm::log(u) / libm::log(z));
    if k >= u32::MAX as f64 {
        u32::MAX
    } else {
        k as u32
    }
}

/// A uniform in (0, 1].
pub fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Smallest J with q^J/(1 - q^J) * 1/(1 - q) < tol.
pub fn multiplicity_cutoff(q: f64, tol: f64) -> usize {
    if q <= 0.0 {
        return 0;
    }
    let mut j = 1usize;
    let mut qj = q;
    while qj / (1.0 - qj) / (1.0 - q) >= tol {
        j += 1;
        qj *= q;
    }
    j
}

/// Exact sample from P(kappa) proportional to q^{|kappa|}, via independent
/// multiplicities m_j ~ Geom(q^j).
pub fn sample_q_partition<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Result<Partition> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Domain("0 <= q < 1 required"));
    }
    let jmax = multiplicity_cutoff(q, 1e-12);
    let mut mult = vec![0u32; jmax];
    let mut qj = 1.0;
    for m in mult.iter_mut() {
        qj *= q;
        *m = geom_from_uniform(qj, open_uniform(rng));
    }
    Ok(Partition::from_multiplicities(&mult))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn conjugates() {
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
        assert_eq!(p(&[5, 5, 2]).conjugate(), p(&[3, 3, 2, 2, 2]));
    }

    #[test]
    fn odd_counts() {
        assert_eq!((p(&[3, 1]).odd_rows(), p(&[3, 1]).odd_cols()), (2, 2));
        assert_eq!((p(&[2, 2]).odd_rows(), p(&[2, 2]).odd_cols()), (0, 0));
        assert_eq!(Partition::empty().odd_cols(), 0);
    }

    #[test]
    fn rejects_increasing() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(Partition::new(vec![2, 1, 0, 0]).unwrap(), p(&[2, 1]));
    }

    #[test]
    fn tableau_examples() {
        let s = |o: &[u32], i: &[u32]| SkewShape::new(p(o), p(i)).unwrap();
        assert_eq!(count_syt(&s(&[1], &[])), BigUint::from(1u32));
        assert_eq!(count_syt(&s(&[2, 1], &[])), BigUint::from(2u32));
        assert_eq!(count_syt(&s(&[2, 2], &[1])), BigUint::from(2u32));
        assert_eq!(count_ssyt(3, &s(&[1], &[])), BigUint::from(3u32));
        assert_eq!(count_ssyt(2, &s(&[2], &[])), BigUint::from(3u32));
        assert_eq!(count_ssyt(1, &s(&[1, 1], &[])), BigUint::from(0u32));
        assert!(SkewShape::new(p(&[1]), p(&[2])).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
        assert_eq!(enumerate_partitions(3).len(), 7);
        assert_eq!(enumerate_partitions(10).len(), 139);
    }
}
