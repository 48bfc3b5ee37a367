//! Dense matrices and LU factorisation with partial pivoting, generic over the scalar.

use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl Matrix<f64> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Matrix { rows: self.rows, cols: other.cols, data: out }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().map(|x| x.abs()).sum())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

/// Scalar interface needed by the elimination.
pub trait LuScalar: Clone {
    /// Monotone proxy for |x|, used only for pivot choice.
    fn magnitude(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn quotient(&self, d: &Self) -> Self;
    /// self -= a * b
    fn sub_product(&mut self, a: &Self, b: &Self);
}

impl LuScalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn quotient(&self, d: &Self) -> Self {
        self / d
    }
    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}

impl LuScalar for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn quotient(&self, d: &Self) -> Self {
        self / d
    }
    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}

/// Outcome of an LU factorisation: the pivots (diagonal of U) and the permutation parity.
#[derive(Debug, Clone)]
pub struct LuPivots<T> {
    pub pivots: Vec<T>,
    pub odd_permutation: bool,
    pub singular: bool,
}

/// Gaussian elimination with partial pivoting on a square matrix.
pub fn lu_pivots<T: LuScalar>(m: &Matrix<T>) -> LuPivots<T> {
    assert_eq!(m.rows, m.cols, "LU needs a square matrix");
    let n = m.rows;
    let mut a = m.data.clone();
    let mut pivots = Vec::with_capacity(n);
    let mut odd = false;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].magnitude();
        for i in k + 1..n {
            let v = a[i * n + k].magnitude();
            if v > best {
                best = v;
                p = i;
            }
        }
        if a[p * n + k].is_zero() {
            return LuPivots { pivots, odd_permutation: odd, singular: true };
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            odd = !odd;
        }
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let prow = &head[k * n..];
        let piv = prow[k].clone();
        for i in 0..n - k - 1 {
            let row = &mut tail[i * n..(i + 1) * n];
            if row[k].is_zero() {
                continue;
            }
            let l = row[k].quotient(&piv);
            for j in k + 1..n {
                row[j].sub_product(&l, &prow[j]);
            }
        }
        pivots.push(piv);
    }
    LuPivots { pivots, odd_permutation: odd, singular: false }
}

/// Solve A x = b in place by LU with partial pivoting (f64).
pub fn solve(m: &Matrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = m.rows;
    let mut a = m.data.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))?;
        if a[p * n + k] == 0.0 {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        for i in k + 1..n {
            let l = a[i * n + k] / a[k * n + k];
            for j in k..n {
                a[i * n + j] -= l * a[k * n + j];
            }
            x[i] -= l * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= a[k * n + j] * x[j];
        }
        x[k] = s / a[k * n + k];
    }
    Some(x)
}

/// Cholesky test for symmetric positive definiteness.
pub fn is_positive_definite(m: &Matrix<f64>) -> bool {
    let n = m.rows;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = *m.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = *m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    true
}
