//! Partition functions of the Gross-Witten and Gaussian models, finite-size free energies, the
//! ratio to Tracy-Widom and the exact width distribution.

use crate::detcore::{
    gw_contour_ratios, gw_log_det, gw_log_det_wrapped, gw_log_ratio_wrapped, hankel_continuous_log_det_closed,
    hankel_discrete_log_det, lattice_spacing, log_det_complex, toeplitz_discrete, DiscreteDomain, LogDet, WeightSpec,
};
use crate::error::{Error, Result};
use crate::phase::tw_argument;
use crate::specfun::log_gamma_unchecked;
use crate::tracywidom::TwEvaluator;
use num_complex::Complex64;
use serde::Serialize;

/// tau used in the Gaussian prefactor is 1 + QP_TAU_EPSILON by default.
pub const QP_TAU_EPSILON: f64 = 1e-3;

/// Largest |log ratio| accepted before exponentiating.
pub const RATIO_LOG_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Model {
    Gw,
    Qp,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gw" => Ok(Model::Gw),
            "qp" => Ok(Model::Qp),
            _ => Err(Error::InvalidArgument(format!("unknown model '{s}' (expected gw or qp)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// chain size / domain size
    pub n: u32,
    /// magnon count
    pub n_f: u32,
    pub t: f64,
    pub delta: f64,
}

impl ModelParams {
    pub fn new(n: u32, n_f: u32, t: f64) -> Result<Self> {
        Self::with_delta(n, n_f, t, 1.0)
    }

    pub fn with_delta(n: u32, n_f: u32, t: f64, delta: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("t must be finite and >= 0, got {t}")));
        }
        if !delta.is_finite() {
            return Err(Error::Domain("delta must be finite".into()));
        }
        Ok(Self { n, n_f, t, delta })
    }

    pub fn tau(&self) -> f64 {
        self.t / self.n_f as f64
    }

    pub fn n_inv(&self) -> f64 {
        self.n as f64 / self.n_f as f64
    }

    pub fn lambda(&self) -> f64 {
        self.n as f64 / (self.n_f as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioReport {
    pub ratio: f64,
    pub log_ratio: f64,
    pub x: f64,
    pub f_of_x: f64,
    pub abs_gap: f64,
}

/// log D_{N_f}(f_GW).
pub fn partition_gw_infinite(p: &ModelParams) -> Result<LogDet> {
    gw_log_det(p.t, p.n_f as usize)
}

/// log D^{|d|}_{N_f}(f_GW) on {z : z^N = s}.
pub fn partition_gw_finite(p: &ModelParams, s: Complex64) -> Result<LogDet> {
    if (s - Complex64::new(1.0, 0.0)).norm() == 0.0 {
        return gw_log_det_wrapped(p.t, p.n_f as usize, p.n);
    }
    let dom = DiscreteDomain::roots_of_unity(p.n, s)?;
    let w = WeightSpec::gross_witten(p.t)?;
    let m = toeplitz_discrete(&w, p.n_f as usize, &dom)?;
    // Hermitian for |s| = 1, so the determinant is real
    let d = log_det_complex(&m);
    if d.log_abs == f64::NEG_INFINITY {
        return Ok(LogDet::SINGULAR);
    }
    Ok(LogDet { log_abs: d.log_abs, sign: if d.arg.cos() < 0.0 { -1 } else { 1 } })
}

/// sum_{j=1}^{N_f} log Gamma(1 + j)
pub fn selberg_log_product(n_f: u32) -> f64 {
    (1..=n_f).map(|j| log_gamma_unchecked(1.0 + j as f64)).sum()
}

/// log[(tau N_f)^{-N_f} prod_{j=1}^{N_f} Gamma(1+j)/Gamma(2)].
pub fn partition_qp_infinite(p: &ModelParams, tau: f64) -> Result<LogDet> {
    if p.n_f < 1 {
        return Err(Error::Domain("Gaussian partition function needs N_f >= 1".into()));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let n_f = p.n_f as f64;
    Ok(LogDet { log_abs: -n_f * (tau * n_f).ln() + selberg_log_product(p.n_f), sign: 1 })
}

fn qp_domain(p: &ModelParams) -> Result<DiscreteDomain> {
    DiscreteDomain::shifted_lattice_auto(p.n, p.n_f, 0.0, p.n_f as usize)
}

/// log H^{|d|}_{N_f}(f_QP) on the unshifted lattice.
pub fn partition_qp_finite(p: &ModelParams) -> Result<LogDet> {
    if p.n_f == 0 {
        return Ok(LogDet::ONE);
    }
    let w = WeightSpec::gaussian(p.n_f)?;
    hankel_discrete_log_det(&w, p.n_f as usize, &qp_domain(p)?)
}

/// log of c_QP H^{|d|}/H, with c_QP = (N sqrt(N_f) / (sqrt 2 pi))^{-N_f}.
pub fn qp_log_ratio(p: &ModelParams) -> Result<f64> {
    if p.n_f == 0 {
        return Ok(0.0);
    }
    let fin = partition_qp_finite(p)?;
    if fin.sign < 0 || fin.is_singular() {
        return Err(Error::IllConditioned("discrete Hankel determinant is not positive".into()));
    }
    let h = lattice_spacing(p.n, p.n_f);
    Ok(p.n_f as f64 * h.ln() + fin.log_abs - hankel_continuous_log_det_closed(p.n_f, p.n_f as usize))
}

/// c Z^{|d|}/Z against F(x).
pub fn ratio_to_tw(p: &ModelParams, model: Model, ev: &TwEvaluator) -> Result<RatioReport> {
    let log_ratio = match model {
        Model::Gw => gw_log_ratio_wrapped(p.t, p.n_f as usize, p.n)?,
        Model::Qp => qp_log_ratio(p)?,
    };
    if !(log_ratio.abs() <= RATIO_LOG_LIMIT) {
        return Err(Error::Overflow(format!("log ratio {log_ratio} exceeds +-{RATIO_LOG_LIMIT}")));
    }
    let ratio = log_ratio.exp();
    let x = tw_argument(p, model)?;
    let f_of_x = ev.cdf(x).clamp(0.0, 1.0);
    Ok(RatioReport { ratio, log_ratio, x, f_of_x, abs_gap: (ratio - f_of_x).abs() })
}

/// (1/N_f^2) log Z^{|d|}.
pub fn free_energy_finite(p: &ModelParams, model: Model) -> Result<f64> {
    if p.n_f < 1 {
        return Err(Error::Domain("free energy needs N_f >= 1".into()));
    }
    let z = match model {
        Model::Gw => partition_gw_finite(p, Complex64::new(1.0, 0.0))?,
        Model::Qp => partition_qp_finite(p)?,
    };
    let n_f = p.n_f as f64;
    Ok(z.log_abs / (n_f * n_f))
}

/// Convergence target of the contour quadrature.
pub const WIDTH_CONTOUR_TOL: f64 = 1e-8;
const WIDTH_MAX_DOUBLINGS: usize = 6;

/// P(W_{N_f}(t) < N) as the contour average of D^{d_s}/D over s = e^{2 pi i k/K}.
pub fn width_probability_exact(n_f: u32, t: f64, n: u32) -> Result<f64> {
    WeightSpec::gross_witten(t)?;
    if n_f < 1 {
        return Err(Error::Domain("width needs N_f >= 1".into()));
    }
    if n < 1 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    if n < n_f {
        return Ok(0.0);
    }
    let avg = |k: usize| -> Result<f64> {
        let v = gw_contour_ratios(t, n_f as usize, n, k)?;
        Ok(v.iter().sum::<f64>() / k as f64)
    };
    let mut k = (4 * n as usize).max(64);
    let mut prev = avg(k)?;
    for _ in 0..WIDTH_MAX_DOUBLINGS {
        k *= 2;
        let cur = avg(k)?;
        if (cur - prev).abs() < WIDTH_CONTOUR_TOL {
            return Ok(cur.clamp(0.0, 1.0));
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!("width contour quadrature unconverged at K={k}")))
}
