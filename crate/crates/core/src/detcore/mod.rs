//! Toeplitz and Hankel matrices for the Gross-Witten and Gaussian weights, and their
//! log-determinants.

pub mod mp;

use crate::error::{Error, Result};
use crate::linalg::{lu_pivots, Matrix};
use crate::specfun::bessel_i;
use mp::{Mp, MpComplex};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WeightSpec {
    /// e^{(t/2)(z + 1/z)} on the unit circle
    GrossWitten { t: f64 },
    /// e^{-N_f x^2} on the real line
    Gaussian { n_f: u32 },
}

impl WeightSpec {
    pub fn gross_witten(t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("Gross-Witten weight needs t >= 0, got {t}")));
        }
        Ok(Self::GrossWitten { t })
    }

    pub fn gaussian(n_f: u32) -> Result<Self> {
        if n_f < 1 {
            return Err(Error::Domain("Gaussian weight needs N_f >= 1".into()));
        }
        Ok(Self::Gaussian { n_f })
    }

    fn gw_t(&self) -> Result<f64> {
        match *self {
            Self::GrossWitten { t } => Ok(t),
            _ => Err(Error::InvalidArgument("Toeplitz builders need a Gross-Witten weight".into())),
        }
    }

    fn gaussian_scale(&self) -> Result<f64> {
        match *self {
            Self::Gaussian { n_f } => Ok(n_f as f64),
            _ => Err(Error::InvalidArgument("Hankel builders need a Gaussian weight".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DiscreteDomain {
    /// {z : z^N = s}
    RootsOfUnity { n: u32, s: Complex64 },
    /// { sqrt(2) pi (m - s) / (N sqrt(N_f)) : |m| <= m_cut }
    ShiftedLattice { n: u32, n_f: u32, s: f64, m_cut: u32 },
}

impl DiscreteDomain {
    pub fn roots_of_unity(n: u32, s: Complex64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("roots-of-unity domain needs N >= 1".into()));
        }
        if (s.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("|s| must be 1, got {}", s.norm())));
        }
        Ok(Self::RootsOfUnity { n, s })
    }

    pub fn shifted_lattice(n: u32, n_f: u32, s: f64, m_cut: u32) -> Result<Self> {
        if n < 1 || n_f < 1 || m_cut < 1 {
            return Err(Error::Domain("lattice domain needs N, N_f, m_cut >= 1".into()));
        }
        if !(0.0..1.0).contains(&s) {
            return Err(Error::Domain(format!("lattice shift must lie in [0, 1), got {s}")));
        }
        Ok(Self::ShiftedLattice { n, n_f, s, m_cut })
    }

    /// Lattice with m_cut chosen so that |x|^{2n} e^{-N_f x^2} < e^{-80} beyond the cut, and with
/// at least 2n + 8 points on each side.
    pub fn shifted_lattice_auto(n: u32, n_f: u32, s: f64, matrix_size: usize) -> Result<Self> {
        let a = n_f as f64;
        let deg = 2.0 * matrix_size.saturating_sub(1) as f64;
        let mut x = (80.0 / a).sqrt().max(1.0);
        while a * x * x - deg * x.ln() < 80.0 {
            x *= 1.05;
        }
        let spacing = lattice_spacing(n, n_f);
        // an n x n Gram matrix needs well over n weighted points, even on a coarse lattice
    let m_cut = ((x / spacing).ceil() as u32 + 2).max(2 * matrix_size as u32 + 8);
        Self::shifted_lattice(n, n_f, s, m_cut)
    }
}

pub fn lattice_spacing(n: u32, n_f: u32) -> f64 {
    2f64.sqrt() * PI / (n as f64 * (n_f as f64).sqrt())
}

/// log |det| and sign. A singular matrix has log_abs = -inf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogDet {
    pub log_abs: f64,
    pub sign: i8,
}

impl LogDet {
    pub const ONE: LogDet = LogDet { log_abs: 0.0, sign: 1 };
    pub const SINGULAR: LogDet = LogDet { log_abs: f64::NEG_INFINITY, sign: 1 };

    pub fn is_singular(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    pub fn value(&self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }

    pub fn from_mp(d: Option<&Mp>) -> LogDet {
        match d {
            None => LogDet::SINGULAR,
            Some(v) if mp::is_zero(v) => LogDet::SINGULAR,
            Some(v) => LogDet {
                log_abs: mp::ln_abs(v),
                sign: if mp::is_negative(v) { -1 } else { 1 },
            },
        }
    }
}

/// log |det| and phase of a complex determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexLogDet {
    pub log_abs: f64,
    pub arg: f64,
}

/// LU with partial pivoting.
pub fn log_det(m: &Matrix<f64>) -> LogDet {
    let lu = lu_pivots(m);
    if lu.singular {
        return LogDet::SINGULAR;
    }
    let mut log_abs = 0.0;
    let mut neg = lu.odd_permutation;
    for p in &lu.pivots {
        log_abs += p.abs().ln();
        if *p < 0.0 {
            neg = !neg;
        }
    }
    LogDet { log_abs, sign: if neg { -1 } else { 1 } }
}

pub fn log_det_complex(m: &Matrix<Complex64>) -> ComplexLogDet {
    let lu = lu_pivots(m);
    if lu.singular {
        return ComplexLogDet { log_abs: f64::NEG_INFINITY, arg: 0.0 };
    }
    let mut log_abs = 0.0;
    let mut arg = if lu.odd_permutation { PI } else { 0.0 };
    for p in &lu.pivots {
        log_abs += p.norm().ln();
        arg += p.arg();
    }
    ComplexLogDet { log_abs, arg: Complex64::from_polar(1.0, arg).arg() }
}

// ---------------------------------------------------------------- Toeplitz

/// Entries I_{j-l}(t).
pub fn toeplitz_continuous(w: &WeightSpec, n: usize) -> Result<Matrix<f64>> {
    let t = w.gw_t()?;
    let table: Vec<f64> = (0..n).map(|k| bessel_i(k as i64, t)).collect::<Result<_>>()?;
    Ok(Matrix::from_fn(n, n, |j, l| table[j.abs_diff(l)]))
}

/// sum_m I_{d+mN}(t) s^m, truncated once |I_{d+mN}| < 1e-18 * |partial sum| past the peak.
fn wrapped_bessel(t: f64, d: i64, big_n: u32, s: Complex64) -> Result<Complex64> {
    let nn = big_n as i64;
    let mut sum = Complex64::new(bessel_i(d, t)?, 0.0);
    for dir in [1i64, -1] {
        let mut m = dir;
        loop {
            let k = d + m * nn;
            let v = bessel_i(k, t)?;
            sum += s.powi(m as i32) * v;
            if (k.unsigned_abs() as f64) > t && v <= 1e-18 * sum.norm() {
                break;
            }
            m += dir;
        }
    }
    Ok(sum)
}

/// (1/N) sum_{z^N = s} z^{-(j-l)} f(z), evaluated through the wrapped Bessel sum.
pub fn toeplitz_discrete(w: &WeightSpec, n: usize, d: &DiscreteDomain) -> Result<Matrix<Complex64>> {
    let t = w.gw_t()?;
    let DiscreteDomain::RootsOfUnity { n: big_n, s } = *d else {
        return Err(Error::InvalidArgument("Toeplitz needs a roots-of-unity domain".into()));
    };
    let entries: Vec<Complex64> = (-(n as i64 - 1)..=(n as i64 - 1))
        .map(|k| wrapped_bessel(t, k, big_n, s))
        .collect::<Result<_>>()?;
    Ok(Matrix::from_fn(n, n, |j, l| entries[j + n - 1 - l]))
}

/// Real s = 1 specialisation of `toeplitz_discrete`.
pub fn toeplitz_discrete_real(w: &WeightSpec, n: usize, big_n: u32) -> Result<Matrix<f64>> {
    let d = DiscreteDomain::roots_of_unity(big_n, Complex64::new(1.0, 0.0))?;
    Ok(toeplitz_discrete(w, n, &d)?.map(|z| z.re))
}

/// The same matrix from the literal root-of-unity sum.
pub fn toeplitz_discrete_direct(w: &WeightSpec, n: usize, d: &DiscreteDomain) -> Result<Matrix<Complex64>> {
    let t = w.gw_t()?;
    let DiscreteDomain::RootsOfUnity { n: big_n, s } = *d else {
        return Err(Error::InvalidArgument("Toeplitz needs a roots-of-unity domain".into()));
    };
    let root = s.powf(1.0 / big_n as f64);
    let zs: Vec<Complex64> =
        (0..big_n).map(|k| root * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / big_n as f64)).collect();
    let fz: Vec<Complex64> = zs.iter().map(|z| (0.5 * t * (z + 1.0 / z)).exp()).collect();
    Ok(Matrix::from_fn(n, n, |j, l| {
        let d = j as i32 - l as i32;
        zs.iter().zip(&fz).map(|(z, f)| z.powi(-d) * f).sum::<Complex64>() / big_n as f64
    }))
}

// ---------------------------------------------------------------- Hankel

/// int x^{j+k} e^{-N_f x^2} dx from the closed-form Gaussian moments.
pub fn hankel_continuous(w: &WeightSpec, n: usize) -> Result<Matrix<f64>> {
    let a = w.gaussian_scale()?;
    let moments: Vec<f64> = (0..2 * n.max(1) - 1)
        .map(|p| {
            if p % 2 == 1 {
                0.0
            } else {
                let m = p / 2;
                let double_fact: f64 = (1..=m).map(|i| (2 * i - 1) as f64).product();
                double_fact * (PI / a).sqrt() * (2.0 * a).powi(-(m as i32))
            }
        })
        .collect();
    Ok(Matrix::from_fn(n, n, |j, k| moments[j + k]))
}

fn lattice_points(d: &DiscreteDomain) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let DiscreteDomain::ShiftedLattice { n: big_n, n_f, s, m_cut } = *d else {
        return Err(Error::InvalidArgument("Hankel needs a shifted-lattice domain".into()));
    };
    let h = lattice_spacing(big_n, n_f);
    let m_cut = m_cut as i64;
    let kept: Vec<f64> = (-m_cut..=m_cut).map(|m| h * (m as f64 - s)).collect();
    // the next stretch beyond the cut, used only to bound the dropped tail
    let dropped: Vec<f64> = (m_cut + 1..m_cut + 400)
        .flat_map(|m| [h * (m as f64 - s), h * (-m as f64 - s)])
        .collect();
    Ok((h, kept, dropped))
}

/// sum_{x in d_s, |m| <= m_cut} x^{j+k} e^{-N_f x^2}
pub fn hankel_discrete(w: &WeightSpec, n: usize, d: &DiscreteDomain) -> Result<Matrix<f64>> {
    let a = w.gaussian_scale()?;
    let (_, kept, dropped) = lattice_points(d)?;
    let moments = |xs: &[f64]| -> Vec<f64> {
        (0..2 * n - 1)
            .map(|p| xs.iter().map(|x| x.powi(p as i32) * (-a * x * x).exp()).sum())
            .collect()
    };
    let inner = moments(&kept);
    let tail = moments(&dropped);
    for p in 0..2 * n - 1 {
        let scale = (inner[2 * (p / 2)].abs() * inner[2 * p.div_ceil(2)].abs()).sqrt();
        if tail[p].abs() > 1e-14 * scale {
            return Err(Error::Truncation(format!(
                "lattice tail beyond m_cut contributes {:.3e} to moment {p} (retained scale {:.3e})",
                tail[p], scale
            )));
        }
    }
    Ok(Matrix::from_fn(n, n, |j, k| inner[j + k]))
}

/// Gram matrix of monic Hermite polynomials for e^{-N_f x^2} over the lattice. It is a
/// unit-triangular transform of `hankel_discrete`, so the determinants coincide, but it stays
/// well conditioned.
pub fn hermite_gram_discrete(w: &WeightSpec, n: usize, d: &DiscreteDomain) -> Result<Matrix<f64>> {
    let a = w.gaussian_scale()?;
    hankel_discrete(w, 1, d)?;
    let (_, kept, _) = lattice_points(d)?;
    let mut g = vec![0.0; n * n];
    let mut p = vec![0.0; n];
    for &x in &kept {
        let wx = (-a * x * x).exp();
        if wx == 0.0 {
            continue;
        }
        p[0] = 1.0;
        if n > 1 {
            p[1] = x;
        }
        for j in 1..n.saturating_sub(1) {
            p[j + 1] = x * p[j] - j as f64 / (2.0 * a) * p[j - 1];
        }
        for j in 0..n {
            for k in 0..=j {
                g[j * n + k] += p[j] * p[k] * wx;
            }
        }
    }
    Ok(Matrix::from_fn(n, n, |j, k| if k <= j { g[j * n + k] } else { g[k * n + j] }))
}

/// log det of the discrete Hankel matrix via the Hermite Gram form, in adaptive extended
/// precision: deep in the small-N regime the determinant is tiny and f64 elimination fails.
pub fn hankel_discrete_log_det(w: &WeightSpec, n: usize, d: &DiscreteDomain) -> Result<LogDet> {
    let a = w.gaussian_scale()?;
    hankel_discrete(w, 1, d)?;
    let DiscreteDomain::ShiftedLattice { n: big_n, n_f, s, m_cut } = *d else {
        return Err(Error::InvalidArgument("Hankel needs a shifted-lattice domain".into()));
    };
    if n == 0 {
        return Ok(LogDet::ONE);
    }
    let h = lattice_spacing(big_n, n_f);
    mp::adaptive(
        128,
        |p| Ok(LogDet::from_mp(mp::det_real(&mp::hermite_gram(a, n, h, s, m_cut as i64, p)).as_ref())),
        logdet_agree,
    )
}

/// log det of the continuous Gaussian Hankel matrix from the monic Hermite norms
/// h_j = sqrt(pi/a) j! / (2a)^j.
pub fn hankel_continuous_log_det_closed(n_f: u32, n: usize) -> f64 {
    let a = n_f as f64;
    (0..n)
        .map(|j| {
            0.5 * (PI / a).ln() + crate::specfun::log_gamma(j as f64 + 1.0).unwrap_or(0.0)
                - j as f64 * (2.0 * a).ln()
        })
        .sum()
}

// ---------------------------------------------------------------- extended-precision routes

fn logdet_agree(a: &LogDet, b: &LogDet) -> bool {
    if a.is_singular() || b.is_singular() {
        return a.is_singular() && b.is_singular();
    }
    a.sign == b.sign && (a.log_abs - b.log_abs).abs() <= 1e-13 * b.log_abs.abs().max(1.0)
}

/// log D_n(f_GW) with adaptive extended precision.
pub fn gw_log_det(t: f64, n: usize) -> Result<LogDet> {
    WeightSpec::gross_witten(t)?;
    if n == 0 {
        return Ok(LogDet::ONE);
    }
    mp::adaptive(
        mp::starting_precision(t),
        |p| Ok(LogDet::from_mp(mp::det_real(&mp::gw_toeplitz(t, n, p)).as_ref())),
        logdet_agree,
    )
}

/// ln D_n(f_GW) - t^2/4, the distance from the strong Szego limit, resolved in extended
/// precision so exponentially small deficits below tau = 1 are not lost to cancellation.
pub fn gw_szego_deficit(t: f64, n: usize) -> Result<f64> {
    WeightSpec::gross_witten(t)?;
    if n == 0 {
        return Ok(-t * t / 4.0);
    }
    mp::adaptive(
        mp::starting_precision(t),
        |p| {
            let d = mp::det_real(&mp::gw_toeplitz(t, n, p))
                .ok_or_else(|| Error::IllConditioned("singular Toeplitz matrix".into()))?;
            let r = d * (-mp::from_f64(t * t / 4.0, p)).exp();
            let dev = mp::to_f64(&(r.clone() - mp::from_u64(1, p)));
            Ok(if dev.abs() < 0.5 { dev.ln_1p() } else { mp::ln_abs(&r) })
        },
        |a: &f64, b: &f64| a == b || (a - b).abs() <= 1e-10 * b.abs(),
    )
}

/// log D_n^{|d|}(f_GW) on the N-th roots of unity (s = 1).
pub fn gw_log_det_wrapped(t: f64, n: usize, big_n: u32) -> Result<LogDet> {
    WeightSpec::gross_witten(t)?;
    if n == 0 {
        return Ok(LogDet::ONE);
    }
    mp::adaptive(
        mp::starting_precision(t),
        |p| Ok(LogDet::from_mp(mp::det_real(&mp::gw_toeplitz_wrapped(t, n, big_n as usize, p)).as_ref())),
        logdet_agree,
    )
}

/// log(D^{|d|}/D) at s = 1, computed as ln det(I + D^{-1}E) with E the wrap correction, so
/// ratios within 1e-300 of one keep full relative precision.
pub fn gw_log_ratio_wrapped(t: f64, n: usize, big_n: u32) -> Result<f64> {
    WeightSpec::gross_witten(t)?;
    if n == 0 {
        return Ok(0.0);
    }
    mp::adaptive(
        mp::starting_precision(t),
        |p| {
            let d = mp::gw_toeplitz(t, n, p);
            let e = mp::gw_wrap_correction(t, n, big_n as usize, p);
            let m = mp::solve(&d, &e).ok_or_else(|| Error::IllConditioned("singular Toeplitz matrix".into()))?;
            Ok(mp::ln_det_identity_plus(&m, p).unwrap_or(f64::NEG_INFINITY))
        },
        |a: &f64, b: &f64| a == b || (a - b).abs() <= 1e-12 * b.abs(),
    )
}

/// Re(D^{d_s}/D) at the K nodes s_k = e^{2 pi i k/K}, k = 0..K.
pub fn gw_contour_ratios(t: f64, n: usize, big_n: u32, big_k: usize) -> Result<Vec<f64>> {
    WeightSpec::gross_witten(t)?;
    if n == 0 {
        return Ok(vec![1.0; big_k]);
    }
    let half = big_k / 2;
    let eval = |p: usize| -> Result<Vec<f64>> {
        let den = mp::det_real(&mp::gw_toeplitz(t, n, p))
            .ok_or_else(|| Error::IllConditioned("singular Toeplitz matrix".into()))?;
        let den = MpComplex::real(den);
        let mut vals = Vec::with_capacity(half + 1);
        for k in 0..=half {
            let m = mp::gw_toeplitz_wrapped_complex(t, n, big_n as usize, k, big_k, p);
            let v = match mp::det_complex(&m) {
                Some(z) => {
                    let r = crate::linalg::LuScalar::quotient(&z, &den);
                    mp::to_f64(&r.re)
                }
                None => 0.0,
            };
            vals.push(v);
        }
        Ok(vals)
    };
    let vals = mp::adaptive(mp::starting_precision(t), eval, |a: &Vec<f64>, b: &Vec<f64>| {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-13)
    })?;
    // conjugate nodes k and K-k give conjugate (Hermitian) matrices with equal determinants
    Ok((0..big_k).map(|k| vals[k.min(big_k - k)]).collect())
}
