//! Special-function kernels: modified Bessel I_k, Airy Ai/Ai', log-gamma.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Truncation control for a power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesAccuracy {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl SeriesAccuracy {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || max_terms < 1 {
            return Err(Error::InvalidArgument(format!(
                "series accuracy needs abs_tol > 0 and max_terms >= 1, got {abs_tol}, {max_terms}"
            )));
        }
        Ok(Self { abs_tol, max_terms })
    }
}

impl Default for SeriesAccuracy {
    fn default() -> Self {
        Self { abs_tol: 1e-17, max_terms: 2000 }
    }
}

/// Above this argument the large-argument expansion is used for small orders.
pub const BESSEL_SERIES_MAX_T: f64 = 30.0;

/// Modified Bessel function of the first kind, I_{|k|}(t).
pub fn bessel_i(k: i64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("bessel_i requires t >= 0, got {t}")));
    }
    let nu = k.unsigned_abs();
    if t > BESSEL_SERIES_MAX_T && asymptotic_applies(nu, t) {
        return Ok(bessel_i_asymptotic(nu, t));
    }
    Ok(bessel_i_series(nu, t, SeriesAccuracy::default()))
}

fn asymptotic_applies(nu: u64, t: f64) -> bool {
    let nu = nu as f64;
    nu * nu <= 0.5 * t
}

/// Ascending series sum_m (t/2)^{2m+nu} / (m! (m+nu)!). All terms are positive.
pub fn bessel_i_series(nu: u64, t: f64, acc: SeriesAccuracy) -> f64 {
    if t == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * t;
    let nuf = nu as f64;
    let lead_log = nuf * half.ln() - ln_factorial(nu);
    // Scale the sum so the largest term is O(1); the prefactor is applied at the end.
    let h2 = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 0.0;
    for _ in 0..acc.max_terms {
        m += 1.0;
        term *= h2 / (m * (m + nuf));
        sum += term;
        if term < acc.abs_tol * sum && m > half {
            break;
        }
    }
    (lead_log + sum.ln()).exp()
}

/// Large-argument expansion e^t/sqrt(2 pi t) sum_j (-1)^j a_j(nu) / t^j, truncated at its
/// smallest term.
pub fn bessel_i_asymptotic(nu: u64, t: f64) -> f64 {
    let mu = 4.0 * (nu as f64) * (nu as f64);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for j in 1..200 {
        let jf = j as f64;
        let odd = 2.0 * jf - 1.0;
        term *= -(mu - odd * odd) / (8.0 * jf * t);
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (t - 0.5 * (2.0 * PI * t).ln()).exp() * sum
}

fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        log_gamma_unchecked(n as f64 + 1.0)
    }
}

// ---------------------------------------------------------------- Airy

/// Maclaurin series is used on [AIRY_MACLAURIN_LO, AIRY_MACLAURIN_HI].
pub const AIRY_MACLAURIN_LO: f64 = -7.0;
pub const AIRY_MACLAURIN_HI: f64 = 5.0;

const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// Airy function Ai(x).
pub fn airy_ai(x: f64) -> f64 {
    airy_pair(x).0
}

/// Derivative Ai'(x).
pub fn airy_ai_prime(x: f64) -> f64 {
    airy_pair(x).1
}

/// (Ai(x), Ai'(x)).
pub fn airy_pair(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x > AIRY_MACLAURIN_HI {
        airy_asymptotic_pos(x)
    } else if x < AIRY_MACLAURIN_LO {
        airy_asymptotic_neg(-x)
    } else {
        airy_maclaurin(x)
    }
}

/// Ai(0) and Ai'(0) from the Gamma function.
pub fn airy_origin_values() -> (f64, f64) {
    let ai0 = (-(2.0 / 3.0) * 3f64.ln() - log_gamma_unchecked(2.0 / 3.0)).exp();
    let aip0 = -(-(1.0 / 3.0) * 3f64.ln() - log_gamma_unchecked(1.0 / 3.0)).exp();
    (ai0, aip0)
}

pub fn airy_maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = sum t_k, g = sum u_k, f' = sum v_k, g' = sum w_k
    let (mut tk, mut uk, mut vk, mut wk) = (1.0, x, 0.5 * x * x, 1.0);
    let (mut f, mut g, mut fp, mut gp) = (tk, uk, vk, wk);
    for k in 0..200 {
        let k3 = 3.0 * k as f64;
        tk *= x3 / ((k3 + 2.0) * (k3 + 3.0));
        uk *= x3 / ((k3 + 3.0) * (k3 + 4.0));
        wk *= x3 / ((k3 + 1.0) * (k3 + 3.0));
        let kk = 3.0 * (k + 1) as f64;
        vk *= x3 / (kk * (kk + 2.0));
        f += tk;
        g += uk;
        fp += vk;
        gp += wk;
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if tk.abs() + uk.abs() + vk.abs() + wk.abs() < 1e-18 * scale && k > 2 {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

/// Coefficients u_k, v_k of the Airy asymptotic expansions.
fn airy_uv(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; n];
    for k in 1..n {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
    }
    (u, v)
}

const AIRY_ASY_TERMS: usize = 40;

fn airy_asymptotic_pos(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (u, v) = airy_uv(AIRY_ASY_TERMS);
    let (mut su, mut sv) = (0.0, 0.0);
    let mut pw = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..AIRY_ASY_TERMS {
        let tu = u[k] * pw;
        if tu.abs() > prev {
            break;
        }
        prev = tu.abs();
        su += tu;
        sv += v[k] * pw;
        pw *= -1.0 / zeta;
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    (e / q * su, -e * q * sv)
}

fn airy_asymptotic_neg(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let (u, v) = airy_uv(AIRY_ASY_TERMS);
    // even/odd partial sums with alternating signs in k
    let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
    let mut pw = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..AIRY_ASY_TERMS {
        let mag = u[k].abs() * pw;
        if mag > prev {
            break;
        }
        prev = mag;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            ue += sign * u[k] * pw;
            ve += sign * v[k] * pw;
        } else {
            uo += sign * u[k] * pw;
            vo += sign * v[k] * pw;
        }
        pw /= zeta;
    }
    let phase = zeta - 0.25 * PI;
    let (s, c) = phase.sin_cos();
    let q = z.powf(0.25);
    let sp = PI.sqrt();
    let ai = (c * ue + s * uo) / (sp * q);
    let aip = q / sp * (s * ve - c * vo);
    (ai, aip)
}

// ---------------------------------------------------------------- log-gamma

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// log Gamma(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires finite x > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 171.0 {
        let mut p = 1.0f64;
        let n = x as u64;
        for i in 2..n {
            p *= i as f64;
        }
        return p.ln();
    }
    if x < 0.5 {
        return log_gamma_unchecked(x + 1.0) - x.ln();
    }
    if x <= 1.5 {
        return lgamma1p(x - 1.0);
    }
    if x <= 2.5 {
        let z = x - 2.0;
        return z.ln_1p() + lgamma1p(z);
    }
    if x < 10.0 {
        // shift down into (1.5, 2.5]; every log term is positive
        let mut y = x;
        let mut acc = 0.0;
        while y > 2.5 {
            y -= 1.0;
            acc += y.ln();
        }
        return acc + log_gamma_unchecked(y);
    }
    stirling(x)
}

/// log Gamma(1+z) for |z| <= 0.5 from the zeta-value Taylor series.
fn lgamma1p(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let mut sum = -EULER_GAMMA * z;
    let mut pw = -z;
    for k in 2..80u32 {
        pw *= -z;
        let term = zeta_int(k) * pw / k as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Riemann zeta at integer k >= 2 via Euler-Maclaurin with M = 20.
fn zeta_int(k: u32) -> f64 {
    let s = k as f64;
    let m = 20.0f64;
    let mut sum = 0.0;
    for n in (1..20).rev() {
        sum += (n as f64).powf(-s);
    }
    let ms = m.powf(-s);
    sum += m * ms / (s - 1.0) + 0.5 * ms;
    // Bernoulli corrections B_{2j}/(2j)! * s(s+1)...(s+2j-2) M^{-s-2j+1}
    let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let mut rising = s;
    let mut fact = 2.0;
    let mut mp = ms / m;
    for (j, bj) in b.iter().enumerate() {
        sum += bj / fact * rising * mp;
        let a = (2 * j + 2) as f64;
        rising *= (s + a - 1.0) * (s + a);
        fact *= (a + 1.0) * (a + 2.0);
        mp /= m * m;
    }
    sum
}

fn stirling(x: f64) -> f64 {
    let c = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for ci in c {
        corr += ci * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + corr
}
