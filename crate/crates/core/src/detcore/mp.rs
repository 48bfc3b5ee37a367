//! Extended-precision scalars for determinants whose f64 LU loses every digit.
//!
//! Bessel Toeplitz matrices have condition numbers up to ~e^{2t}; LU runs at a precision of
//! roughly 2t/ln 2 bits plus guard, chosen adaptively by agreement of two precisions.

use crate::error::{Error, Result};
use crate::linalg::{lu_pivots, LuScalar, Matrix};
use crate::specfun::{bessel_i, log_gamma};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

pub type Mp = FBig<HalfEven, 2>;

pub const MAX_PRECISION: usize = 16384;

pub fn from_f64(x: f64, prec: usize) -> Mp {
    Mp::try_from(x).expect("finite f64").with_precision(prec).value()
}

pub fn from_u64(k: u64, prec: usize) -> Mp {
    Mp::from(k).with_precision(prec).value()
}

pub fn is_negative(x: &Mp) -> bool {
    *x < Mp::ZERO
}

pub fn is_zero(x: &Mp) -> bool {
    x.repr().significand().is_zero()
}

/// Approximate log2 |x| (-inf for zero).
pub fn log2_abs(x: &Mp) -> f64 {
    if is_zero(x) {
        return f64::NEG_INFINITY;
    }
    let f = x.to_f64().value().abs();
    if f.is_finite() && f > 1e-300 {
        return f.log2();
    }
    let r = x.repr();
    r.exponent() as f64 + r.digits() as f64
}

/// ln |x| as f64 (-inf for zero).
pub fn ln_abs(x: &Mp) -> f64 {
    if is_zero(x) {
        return f64::NEG_INFINITY;
    }
    let a = if is_negative(x) { -x.clone() } else { x.clone() };
    a.ln().to_f64().value()
}

pub fn to_f64(x: &Mp) -> f64 {
    x.to_f64().value()
}

impl LuScalar for Mp {
    fn magnitude(&self) -> f64 {
        log2_abs(self)
    }
    fn is_zero(&self) -> bool {
        is_zero(self)
    }
    fn quotient(&self, d: &Self) -> Self {
        self / d
    }
    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self = &*self - a * b;
    }
}

#[derive(Debug, Clone)]
pub struct MpComplex {
    pub re: Mp,
    pub im: Mp,
}

impl MpComplex {
    pub fn real(re: Mp) -> Self {
        let im = re.clone() - &re;
        Self { re, im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn scale(&self, a: &Mp) -> Self {
        Self { re: &self.re * a, im: &self.im * a }
    }
}

impl LuScalar for MpComplex {
    fn magnitude(&self) -> f64 {
        log2_abs(&self.re).max(log2_abs(&self.im))
    }
    fn is_zero(&self) -> bool {
        is_zero(&self.re) && is_zero(&self.im)
    }
    fn quotient(&self, d: &Self) -> Self {
        let den = &d.re * &d.re + &d.im * &d.im;
        Self {
            re: (&self.re * &d.re + &self.im * &d.im) / &den,
            im: (&self.im * &d.re - &self.re * &d.im) / &den,
        }
    }
    fn sub_product(&mut self, a: &Self, b: &Self) {
        let p = a.mul(b);
        self.re = &self.re - &p.re;
        self.im = &self.im - &p.im;
    }
}

/// Determinant as an extended-precision value (None if an exact zero pivot appears).
pub fn det<T: LuScalar + Clone + std::ops::Neg<Output = T>>(m: &Matrix<T>, mul: impl Fn(&T, &T) -> T) -> Option<T> {
    let lu = lu_pivots(m);
    if lu.singular {
        return None;
    }
    let mut it = lu.pivots.into_iter();
    let first = it.next()?;
    let d = it.fold(first, |acc, p| mul(&acc, &p));
    Some(if lu.odd_permutation { -d } else { d })
}

impl std::ops::Neg for MpComplex {
    type Output = MpComplex;
    fn neg(self) -> MpComplex {
        MpComplex { re: -self.re, im: -self.im }
    }
}

pub fn det_real(m: &Matrix<Mp>) -> Option<Mp> {
    det(m, |a, b| a * b)
}

pub fn det_complex(m: &Matrix<MpComplex>) -> Option<MpComplex> {
    det(m, |a, b| a.mul(b))
}

// ---------------------------------------------------------------- Bessel tables

/// Upper bound on ln I_k(t): (t/2)^k/k! e^{t^2/(4(k+1))}.
fn ln_bessel_upper(k: usize, t: f64) -> f64 {
    if t == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let kf = k as f64;
    kf * (0.5 * t).ln() - log_gamma(kf + 1.0).unwrap_or(0.0) + t * t / (4.0 * (kf + 1.0))
}

/// Smallest index beyond which every I_k(t) is below 2^{-bits} I_0(t).
pub fn bessel_cutoff(t: f64, bits: usize) -> usize {
    let ln_i0 = bessel_i(0, t).map(f64::ln).unwrap_or(t);
    let floor = ln_i0 - bits as f64 * std::f64::consts::LN_2;
    let mut k = (t.ceil() as usize).max(1);
    while ln_bessel_upper(k, t) > floor {
        k += 1;
    }
    k
}

/// I_k(t) for k = 0..=kmax at `prec` bits from the ascending series.
pub fn bessel_table(t: f64, kmax: usize, prec: usize) -> Vec<Mp> {
    let work = prec + 32;
    let half = from_f64(0.5 * t, work);
    let h2 = &half * &half;
    let mut lead = from_u64(1, work);
    let mut out = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        if k > 0 {
            lead = lead * &half / from_u64(k as u64, work);
        }
        if t == 0.0 {
            out.push(if k == 0 { from_u64(1, prec) } else { from_u64(0, prec) });
            continue;
        }
        let mut term = lead.clone();
        let mut sum = lead.clone();
        let mut m = 0u64;
        loop {
            m += 1;
            term = term * &h2 / from_u64(m * (m + k as u64), work);
            sum = &sum + &term;
            if m as f64 > 0.5 * t && log2_abs(&term) < log2_abs(&sum) - (work as f64 + 8.0) {
                break;
            }
        }
        out.push(sum.with_precision(prec).value());
    }
    out
}

/// e^{2 pi i k / K} at `prec` bits.
pub fn root_of_unity(k: usize, big_k: usize, prec: usize) -> MpComplex {
    let x = from_u64((k % big_k) as u64, prec);
    let (s, c) = x.sin_cos_unit(big_k);
    MpComplex { re: c, im: s }
}

// ---------------------------------------------------------------- Gross-Witten Toeplitz

/// Continuous D_n(f_GW) matrix with entries I_{j-l}(t).
pub fn gw_toeplitz(t: f64, n: usize, prec: usize) -> Matrix<Mp> {
    let table = bessel_table(t, n.saturating_sub(1), prec);
    Matrix::from_fn(n, n, |j, l| table[j.abs_diff(l)].clone())
}

/// Wrapped entries sum_m I_{d+mN}(t) s^m for d in -(n-1)..=(n-1), s = e^{2 pi i k/K}.
/// Returns them indexed by d + n - 1. With `node = None` s = 1 and the result is real.
/// With `correction_only` the m = 0 term is left out.
fn wrapped_entries(
    t: f64,
    n: usize,
    big_n: usize,
    node: Option<(usize, usize)>,
    correction_only: bool,
    prec: usize,
) -> Vec<MpComplex> {
    let mut kmax = bessel_cutoff(t, prec + 40).max(n);
    if correction_only {
        // keep the leading wrap terms at full relative precision
        kmax = kmax.max(2 * big_n + n);
    }
    let table = bessel_table(t, kmax, prec);
    let zero = from_u64(0, prec);
    let mut out = Vec::with_capacity(2 * n - 1);
    let mmax = (kmax / big_n + 2) as i64;
    let mut powers: Vec<MpComplex> = Vec::new();
    if let Some((k, big_k)) = node {
        for m in -mmax..=mmax {
            let e = (k as i64 * m).rem_euclid(big_k as i64) as usize;
            powers.push(root_of_unity(e, big_k, prec));
        }
    }
    for d in -(n as i64 - 1)..=(n as i64 - 1) {
        let mut re = zero.clone();
        let mut acc = MpComplex::real(zero.clone());
        for m in -mmax..=mmax {
            if correction_only && m == 0 {
                continue;
            }
            let idx = (d + m * big_n as i64).unsigned_abs() as usize;
            if idx > kmax {
                continue;
            }
            match node {
                None => re = &re + &table[idx],
                Some(_) => acc = acc.add(&powers[(m + mmax) as usize].scale(&table[idx])),
            }
        }
        out.push(if node.is_none() { MpComplex::real(re) } else { acc });
    }
    out
}

/// E = D^{|d|} - D at s = 1: entries sum_{m != 0} I_{d+mN}(t).
pub fn gw_wrap_correction(t: f64, n: usize, big_n: usize, prec: usize) -> Matrix<Mp> {
    let e = wrapped_entries(t, n, big_n, None, true, prec);
    Matrix::from_fn(n, n, |j, l| e[j + n - 1 - l].re.clone())
}

/// Solve A X = B (B given column-major as a matrix) by LU with partial pivoting.
pub fn solve(a: &Matrix<Mp>, b: &Matrix<Mp>) -> Option<Matrix<Mp>> {
    let n = a.rows();
    let c = b.cols();
    let mut aa: Vec<Mp> = a.as_slice().to_vec();
    let mut bb: Vec<Mp> = b.as_slice().to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| log2_abs(&aa[i * n + k]).total_cmp(&log2_abs(&aa[j * n + k])))?;
        if is_zero(&aa[p * n + k]) {
            return None;
        }
        if p != k {
            for j in 0..n {
                aa.swap(k * n + j, p * n + j);
            }
            for j in 0..c {
                bb.swap(k * c + j, p * c + j);
            }
        }
        for i in k + 1..n {
            if is_zero(&aa[i * n + k]) {
                continue;
            }
            let l = &aa[i * n + k] / &aa[k * n + k];
            for j in k + 1..n {
                aa[i * n + j] = &aa[i * n + j] - &l * &aa[k * n + j];
            }
            for j in 0..c {
                bb[i * c + j] = &bb[i * c + j] - &l * &bb[k * c + j];
            }
        }
    }
    for k in (0..n).rev() {
        for j in 0..c {
            let mut s = bb[k * c + j].clone();
            for i in k + 1..n {
                s -= &aa[k * n + i] * &bb[i * c + j];
            }
            bb[k * c + j] = s / &aa[k * n + k];
        }
    }
    Some(Matrix::from_fn(n, c, |i, j| bb[i * c + j].clone()))
}

fn matmul(a: &Matrix<Mp>, b: &Matrix<Mp>, prec: usize) -> Matrix<Mp> {
    let n = a.rows();
    Matrix::from_fn(n, b.cols(), |i, j| {
        let mut s = from_u64(0, prec);
        for k in 0..a.cols() {
            s += a.get(i, k) * b.get(k, j);
        }
        s
    })
}

/// ln det(I + M). Uses the trace series sum (-1)^{k+1} tr(M^k)/k when M is small so that
/// values of order 1e-300 and below keep full relative precision.
pub fn ln_det_identity_plus(m: &Matrix<Mp>, prec: usize) -> Option<f64> {
    let n = m.rows();
    let norm = (0..n)
        .map(|i| (0..n).map(|j| to_f64(m.get(i, j)).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if norm < 0.25 {
        let mut pw = m.clone();
        let mut sum = from_u64(0, prec);
        for k in 1..4 * prec {
            let mut tr = from_u64(0, prec);
            for i in 0..n {
                tr += pw.get(i, i);
            }
            let term = tr / from_u64(k as u64, prec);
            sum = if k % 2 == 1 { sum + &term } else { sum - &term };
            if is_zero(&term) || log2_abs(&term) < log2_abs(&sum) - prec as f64 - 8.0 {
                break;
            }
            pw = matmul(&pw, m, prec);
        }
        return Some(to_f64(&sum));
    }
    let one = from_u64(1, prec);
    let ipm = Matrix::from_fn(n, n, |i, j| if i == j { &one + m.get(i, j) } else { m.get(i, j).clone() });
    let d = det_real(&ipm)?;
    if is_negative(&d) || is_zero(&d) {
        return None;
    }
    Some(to_f64(&d.ln()))
}

pub fn gw_toeplitz_wrapped(t: f64, n: usize, big_n: usize, prec: usize) -> Matrix<Mp> {
    let e = wrapped_entries(t, n, big_n, None, false, prec);
    Matrix::from_fn(n, n, |j, l| e[j + n - 1 - l].re.clone())
}

pub fn gw_toeplitz_wrapped_complex(t: f64, n: usize, big_n: usize, k: usize, big_k: usize, prec: usize) -> Matrix<MpComplex> {
    let e = wrapped_entries(t, n, big_n, Some((k, big_k)), false, prec);
    Matrix::from_fn(n, n, |j, l| e[j + n - 1 - l].clone())
}

/// Gram matrix of the monic Hermite polynomials for e^{-a x^2} over x = h (m - s), |m| <= m_cut.
pub fn hermite_gram(a: f64, n: usize, h: f64, s: f64, m_cut: i64, prec: usize) -> Matrix<Mp> {
    let zero = from_u64(0, prec);
    let a_mp = from_f64(a, prec);
    let h_mp = from_f64(h, prec);
    let s_mp = from_f64(s, prec);
    let inv_2a: Vec<Mp> = (0..n).map(|j| from_u64(j as u64, prec) / (&a_mp * from_u64(2, prec))).collect();
    let mut g = vec![zero.clone(); n * n];
    let mut p = vec![zero.clone(); n];
    for m in -m_cut..=m_cut {
        let mm = if m < 0 { -from_u64(m.unsigned_abs(), prec) } else { from_u64(m as u64, prec) };
        let x = &h_mp * (mm - &s_mp);
        let wx = (-(&a_mp * &x * &x)).exp();
        p[0] = from_u64(1, prec);
        if n > 1 {
            p[1] = x.clone();
        }
        for j in 1..n.saturating_sub(1) {
            p[j + 1] = &x * &p[j] - &inv_2a[j] * &p[j - 1];
        }
        for j in 0..n {
            let pw = &p[j] * &wx;
            for k in 0..=j {
                g[j * n + k] = &g[j * n + k] + &pw * &p[k];
            }
        }
    }
    Matrix::from_fn(n, n, |j, k| if k <= j { g[j * n + k].clone() } else { g[k * n + j].clone() })
}

/// Starting precision for Bessel Toeplitz work: condition number is at most e^{2t}.
pub fn starting_precision(t: f64) -> usize {
    let bits = 2.0 * t / std::f64::consts::LN_2 * 1.1 + 96.0;
    ((bits / 64.0).ceil() as usize * 64).max(128)
}

/// Evaluate `f` at increasing precision until two successive levels agree within
/// `tol(value)`; returns the higher-precision value.
pub fn adaptive<T, F, A>(start: usize, f: F, agree: A) -> Result<T>
where
    F: Fn(usize) -> Result<T>,
    A: Fn(&T, &T) -> bool,
{
    let mut p = start.max(64);
    let mut lo = f(p)?;
    loop {
        let q = p + p / 2;
        if q > MAX_PRECISION {
            return Err(Error::IllConditioned(format!(
                "determinant did not stabilise below {MAX_PRECISION} bits"
            )));
        }
        let hi = f(q)?;
        if agree(&lo, &hi) {
            return Ok(hi);
        }
        p = q;
        lo = hi;
    }
}
