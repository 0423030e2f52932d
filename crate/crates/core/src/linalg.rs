//! Dense matrices, pfaffians and Fredholm pfaffians of 2x2 matrix kernels.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::{Complex64 as C, ComplexFloat};

use crate::{Error, Result};

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::default(); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        let data: Vec<T> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), n * n, "matrix must be square");
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// Principal submatrix on indices lo..hi.
    pub fn block(&self, lo: usize, hi: usize) -> Self {
        Self::from_fn(hi - lo, |i, j| self[(lo + i, lo + j)])
    }

    fn swap_rows_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.n;
        for j in 0..n {
            self.data.swap(a * n + j, b * n + j);
        }
        for i in 0..n {
            self.data.swap(i * n + a, i * n + b);
        }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: ComplexFloat + Default> Mat<T> {
    /// Largest |A + A^T| entry.
    pub fn skew_defect(&self) -> f64
    where
        T::Real: Into<f64>,
    {
        let mut d: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                d = d.max((self[(i, j)] + self[(j, i)]).abs().into());
            }
        }
        d
    }

    /// Replace A by (A - A^T)/2, returning the defect that was removed.
    pub fn skew_symmetrize(&mut self) -> f64
    where
        T::Real: Into<f64>,
    {
        let defect = self.skew_defect();
        let two = T::one() + T::one();
        for i in 0..self.n {
            self[(i, i)] = T::zero();
            for j in i + 1..self.n {
                let a = (self[(i, j)] - self[(j, i)]) / two;
                self[(i, j)] = a;
                self[(j, i)] = T::zero() - a;
            }
        }
        defect
    }
}

/// Pfaffian by skew-symmetric elimination with partial pivoting.
/// Only the strict upper triangle is read.
pub fn pfaffian<T: ComplexFloat + Default>(a: &Mat<T>) -> Result<T> {
    let n = a.dim();
    if n % 2 == 1 {
        return Err(Error::Invalid("pfaffian of odd dimension"));
    }
    let mut m = a.clone();
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = T::zero() - m[(j, i)];
        }
        m[(i, i)] = T::zero();
    }
    let mut res = T::one();
    let mut k = 0;
    while k + 1 < n {
        let mut piv = k + 1;
        let mut best = m[(k, k + 1)].abs();
        for j in k + 2..n {
            let v = m[(k, j)].abs();
            if v > best {
                best = v;
                piv = j;
            }
        }
        if piv != k + 1 {
            m.swap_rows_cols(k + 1, piv);
            res = T::zero() - res;
        }
        let p = m[(k, k + 1)];
        if p == T::zero() {
            return Ok(T::zero());
        }
        res = res * p;
        for i in k + 2..n {
            let ci = m[(k + 1, i)] / p;
            let di = m[(k, i)] / p;
            for j in k + 2..n {
                let v = m[(i, j)] + ci * m[(k, j)] - di * m[(k + 1, j)];
                m[(i, j)] = v;
            }
        }
        k += 2;
    }
    Ok(res)
}

/// Determinant by LU with partial pivoting.
pub fn det<T: ComplexFloat + Default>(a: &Mat<T>) -> T {
    let n = a.dim();
    let mut m = a.clone();
    let mut d = T::one();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if m[(i, k)].abs() > m[(piv, k)].abs() {
                piv = i;
            }
        }
        if m[(piv, k)] == T::zero() {
            return T::zero();
        }
        if piv != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            d = T::zero() - d;
        }
        let p = m[(k, k)];
        d = d * p;
        for i in k + 1..n {
            let f = m[(i, k)] / p;
            if f == T::zero() {
                continue;
            }
            for j in k + 1..n {
                let v = m[(i, j)] - f * m[(k, j)];
                m[(i, j)] = v;
            }
        }
    }
    d
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
pub fn solve(a: &Mat<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if m[(i, k)].abs() > m[(piv, k)].abs() {
                piv = i;
            }
        }
        if m[(piv, k)] == 0.0 {
            return Err(Error::Invalid("singular system"));
        }
        if piv != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            x.swap(k, piv);
        }
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                let v = m[(i, j)] - f * m[(k, j)];
                m[(i, j)] = v;
            }
            x[i] -= f * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= m[(k, j)] * x[j];
        }
        x[k] = s / m[(k, k)];
    }
    Ok(x)
}

/// Samples of a 2x2 matrix kernel on a node set: K11, K12, K22, with
/// K21(x, y) = -K12(y, x) implied.
#[derive(Debug, Clone)]
pub struct KernelBlocks {
    pub k11: Mat<C>,
    pub k12: Mat<C>,
    pub k22: Mat<C>,
}

impl KernelBlocks {
    pub fn len(&self) -> usize {
        self.k11.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Restriction to nodes lo..hi.
    pub fn window(&self, lo: usize, hi: usize) -> Self {
        Self {
            k11: self.k11.block(lo, hi),
            k12: self.k12.block(lo, hi),
            k22: self.k22.block(lo, hi),
        }
    }

    /// Interleaved 2m x 2m matrix J - sqrt(w) K sqrt(w), components of each
    /// node adjacent.
    pub fn j_minus(&self, weights: Option<&[f64]>) -> Mat<C> {
        let m = self.len();
        let sw: Vec<f64> = match weights {
            Some(w) => w.iter().map(|x| x.sqrt()).collect(),
            None => vec![1.0; m],
        };
        let mut out = Mat::zeros(2 * m);
        for i in 0..m {
            for j in 0..m {
                let s = sw[i] * sw[j];
                out[(2 * i, 2 * j)] = -self.k11[(i, j)] * s;
                out[(2 * i, 2 * j + 1)] = -self.k12[(i, j)] * s;
                out[(2 * i + 1, 2 * j)] = self.k12[(j, i)] * s;
                out[(2 * i + 1, 2 * j + 1)] = -self.k22[(i, j)] * s;
            }
            out[(2 * i, 2 * i + 1)] += 1.0;
            out[(2 * i + 1, 2 * i)] -= 1.0;
        }
        out
    }
}

/// Pfaffians of all leading 2j x 2j principal blocks, j = 1..n/2, by
/// elimination without pivoting. Suited to matrices close to J.
pub fn leading_pfaffians(a: &Mat<C>) -> Result<Vec<C>> {
    let n = a.dim();
    if n % 2 == 1 {
        return Err(Error::Invalid("pfaffian of odd dimension"));
    }
    let mut m = a.clone();
    let mut out = Vec::with_capacity(n / 2);
    let mut acc = C::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        let p = m[(k, k + 1)];
        acc *= p;
        out.push(acc);
        if p == C::new(0.0, 0.0) {
            out.resize(n / 2, C::new(0.0, 0.0));
            return Ok(out);
        }
        for i in k + 2..n {
            let ci = m[(k + 1, i)] / p;
            let di = m[(k, i)] / p;
            for j in k + 2..n {
                let v = m[(i, j)] + ci * m[(k, j)] - di * m[(k + 1, j)];
                m[(i, j)] = v;
            }
        }
        k += 2;
    }
    Ok(out)
}

impl KernelBlocks {
    /// pf(J - K) on nodes i..len for every i, in one elimination pass over the
    /// nodes taken in reverse order.
    pub fn trailing_pfaffians(&self) -> Result<Vec<C>> {
        let m = self.len();
        let rev = |b: &Mat<C>| Mat::from_fn(m, |i, j| b[(m - 1 - i, m - 1 - j)]);
        let r = KernelBlocks { k11: rev(&self.k11), k12: rev(&self.k12), k22: rev(&self.k22) };
        let mut a = r.j_minus(None);
        a.skew_symmetrize();
        let mut lead = leading_pfaffians(&a)?;
        lead.reverse();
        Ok(lead)
    }

    /// Largest entry in the rows and columns of the last node.
    pub fn edge_magnitude(&self) -> f64 {
        let m = self.len();
        if m == 0 {
            return 0.0;
        }
        let last = m - 1;
        let mut d: f64 = 0.0;
        for i in 0..m {
            for b in [&self.k11, &self.k12, &self.k22] {
                d = d.max(b[(i, last)].norm()).max(b[(last, i)].norm());
            }
        }
        d
    }
}

/// pf(J - K) for a kernel sampled at quadrature nodes with weights `w`, or on
/// lattice points when `w` is `None`.
pub fn fredholm_pfaffian(kernel: &KernelBlocks, weights: Option<&[f64]>) -> Result<C> {
    if kernel.is_empty() {
        return Ok(C::new(1.0, 0.0));
    }
    let mut m = kernel.j_minus(weights);
    m.skew_symmetrize();
    pfaffian(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let a = Mat::from_rows(vec![vec![0.0, 3.5], vec![-3.5, 0.0]]);
        assert_eq!(pfaffian(&a).unwrap(), 3.5);
    }

    #[test]
    fn odd_dimension_rejected() {
        assert!(pfaffian(&Mat::<f64>::zeros(3)).is_err());
    }

    #[test]
    fn solve_small() {
        let a = Mat::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = solve(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }
}
