//! Closed-form large-N free energies, the scaling functions mu/sigma/j, phase regions of the
//! Gross-Witten and Gaussian diagrams, and numerical detection of transition order.

use crate::error::{Error, Result};
use crate::partition::{Model, ModelParams};
use crate::specfun::log_gamma_unchecked;
use crate::tracywidom::TwEvaluator;
use serde::Serialize;
use std::fmt;

/// Coefficient of the cubic wall corrections.
pub const C2: f64 = 1.0 / 12.0;

/// Reference magnon count used for A_QP when the caller gives none.
pub const DEFAULT_QP_REFERENCE_NF: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    I,
    II,
    III,
    IV,
    #[serde(rename = "QP_I")]
    QpI,
    #[serde(rename = "QP_II")]
    QpII,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::IV => "IV",
            Region::QpI => "QP_I",
            Region::QpII => "QP_II",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub tau: Option<f64>,
    pub n_inv: Option<f64>,
    pub lambda: Option<f64>,
    pub region: Region,
    pub free_energy: f64,
    pub wall_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPair {
    pub mu: f64,
    pub sigma: f64,
}

/// mu and sigma for real-valued N_f (the integer entry point is `mu_sigma`).
pub fn mu_sigma_real(n_f: f64, t: f64) -> Result<ScalingPair> {
    if !(t > 0.0) || !t.is_finite() || !(n_f > 0.0) {
        return Err(Error::Domain(format!("mu/sigma need N_f > 0 and t > 0, got N_f={n_f}, t={t}")));
    }
    if n_f >= t {
        Ok(ScalingPair { mu: n_f + t, sigma: 2f64.powf(-1.0 / 3.0) * t.cbrt() })
    } else {
        let r = (n_f / t).sqrt() + (t / n_f).sqrt();
        Ok(ScalingPair { mu: 2.0 * (n_f * t).sqrt(), sigma: 2f64.powf(-2.0 / 3.0) * t.cbrt() * r.cbrt() })
    }
}

pub fn mu_sigma(n_f: u32, t: f64) -> Result<ScalingPair> {
    mu_sigma_real(n_f as f64, t)
}

/// Position of the wall n^{-1} = mu/N_f at scaled time tau.
pub fn wall_n_inv(tau: f64) -> f64 {
    if tau <= 1.0 {
        tau + 1.0
    } else {
        2.0 * tau.sqrt()
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Scaled Tracy-Widom argument: x = N_f^{2/3} j.
pub fn j_param(tau: f64, n_inv: f64) -> Result<f64> {
    check_positive("tau", tau)?;
    let num = n_inv - wall_n_inv(tau);
    let den = if tau <= 1.0 {
        2f64.powf(-1.0 / 3.0) * tau.cbrt()
    } else {
        2f64.powf(-2.0 / 3.0) * tau.cbrt() * (tau.sqrt() + 1.0 / tau.sqrt()).cbrt()
    };
    Ok(num / den)
}

pub fn free_energy_gw_infinite(tau: f64) -> Result<f64> {
    check_positive("tau", tau)?;
    Ok(gw_infinite(tau))
}

fn gw_infinite(tau: f64) -> f64 {
    if tau <= 1.0 {
        tau * tau / 4.0
    } else {
        tau - 0.75 - 0.5 * tau.ln()
    }
}

pub fn free_energy_gw_finite(tau: f64, n_inv: f64) -> Result<f64> {
    check_positive("tau", tau)?;
    check_positive("n_inv", n_inv)?;
    Ok(gw_finite(tau, n_inv))
}

fn gw_finite(tau: f64, n_inv: f64) -> f64 {
    let wall = wall_n_inv(tau);
    let base = gw_infinite(tau);
    if n_inv >= wall {
        return base;
    }
    let scale = if tau <= 1.0 { 0.5 * tau } else { 0.25 * tau * (tau.sqrt() + 1.0 / tau.sqrt()) };
    base - C2 / scale * (wall - n_inv).powi(3)
}

/// A_QP at a finite reference size: (1/N_f^2) sum_{j=1}^{N_f} (log Gamma(1+j) - log Gamma(2)).
pub fn a_qp(n_f_ref: u32) -> f64 {
    let n = n_f_ref as f64;
    (1..=n_f_ref).map(|j| log_gamma_unchecked(1.0 + j as f64)).sum::<f64>() / (n * n)
}

pub fn free_energy_qp_finite(lambda: f64, n_f_ref: u32) -> Result<f64> {
    check_positive("lambda", lambda)?;
    if n_f_ref < 2 {
        return Err(Error::Domain("A_QP needs a reference N_f >= 2".into()));
    }
    Ok(qp_finite(lambda, a_qp(n_f_ref)))
}

fn qp_finite(lambda: f64, a: f64) -> f64 {
    if lambda < 2.0 {
        a - (2.0 - lambda).powi(3) / 3.0
    } else {
        a
    }
}

// ---------------------------------------------------------------- classification

fn dist_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let u = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((p.0 - a.0 - u * dx).powi(2) + (p.1 - a.1 - u * dy).powi(2)).sqrt()
}

/// Distance to {(s, 2 sqrt s) : s >= 1}.
fn dist_to_sqrt_curve(tau: f64, n_inv: f64) -> f64 {
    if tau >= 1.0 && n_inv == 2.0 * tau.sqrt() {
        return 0.0;
    }
    // squared distance is smooth in s; golden-section search on a bracket around the point
    let d2 = |s: f64| (s - tau).powi(2) + (2.0 * s.sqrt() - n_inv).powi(2);
    let (mut lo, mut hi) = (1.0, 1.0 + tau.max(1.0) + n_inv * n_inv);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    for _ in 0..200 {
        if d2(c) < d2(d) {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - g * (hi - lo);
        d = lo + g * (hi - lo);
    }
    d2(0.5 * (lo + hi)).min(d2(1.0)).sqrt()
}

/// Distance in the (tau, n_inv) plane to the nearest wall: the line n_inv = tau + 1 (tau <= 1),
/// the curve n_inv = 2 sqrt(tau) (tau >= 1) and the line tau = 1.
pub fn wall_distance(tau: f64, n_inv: f64) -> f64 {
    let blue = if n_inv == tau + 1.0 && tau <= 1.0 {
        0.0
    } else {
        dist_to_segment((tau, n_inv), (0.0, 1.0), (1.0, 2.0))
    };
    blue.min(dist_to_sqrt_curve(tau, n_inv)).min((tau - 1.0).abs())
}

/// Region of the finite Gross-Witten diagram. Wall points take the smaller region index.
pub fn classify(tau: f64, n_inv: f64) -> Result<PhasePoint> {
    check_positive("tau", tau)?;
    check_positive("n_inv", n_inv)?;
    let wall = wall_n_inv(tau);
    let region = match (tau <= 1.0, n_inv <= wall) {
        (true, true) => Region::I,
        (true, false) => Region::II,
        (false, true) => Region::III,
        (false, false) => Region::IV,
    };
    Ok(PhasePoint {
        tau: Some(tau),
        n_inv: Some(n_inv),
        lambda: None,
        region,
        free_energy: gw_finite(tau, n_inv),
        wall_distance: wall_distance(tau, n_inv),
    })
}

pub fn classify_qp(lambda: f64) -> Result<PhasePoint> {
    classify_qp_at(lambda, DEFAULT_QP_REFERENCE_NF)
}

pub fn classify_qp_at(lambda: f64, n_f_ref: u32) -> Result<PhasePoint> {
    let free_energy = free_energy_qp_finite(lambda, n_f_ref)?;
    Ok(PhasePoint {
        tau: None,
        n_inv: None,
        lambda: Some(lambda),
        region: if lambda <= 2.0 { Region::QpI } else { Region::QpII },
        free_energy,
        wall_distance: (lambda - 2.0).abs(),
    })
}

/// Tracy-Widom argument of the width at (N_f, t, N).
pub fn tw_argument(p: &ModelParams, model: Model) -> Result<f64> {
    let n = p.n as f64;
    let n_f = p.n_f as f64;
    match model {
        Model::Gw => {
            let ms = mu_sigma(p.n_f, p.t)?;
            Ok((n - ms.mu) / ms.sigma)
        }
        Model::Qp => {
            if p.n_f < 1 {
                return Err(Error::Domain("QP argument needs N_f >= 1".into()));
            }
            Ok((n - 2.0 * n_f.sqrt()) * 2f64.powf(2.0 / 3.0) * n_f.powf(1.0 / 6.0))
        }
    }
}

/// P(W >= N) = 1 - F(x) at the Tracy-Widom argument of the model.
pub fn boundary_hit_probability(p: &ModelParams, model: Model, ev: &TwEvaluator) -> Result<f64> {
    if model == Model::Gw && !(p.t > 0.0) {
        return Err(Error::Domain("boundary-hit probability needs t > 0".into()));
    }
    Ok(ev.sf(tw_argument(p, model)?))
}

// ---------------------------------------------------------------- transition order

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Wall {
    TauOneGw,
    BlueIII,
    GreenIIIV,
    RedIIIIV,
    BlackIIII,
    QpWall,
}

impl Wall {
    pub const ALL: [Wall; 6] =
        [Wall::TauOneGw, Wall::BlueIII, Wall::GreenIIIV, Wall::RedIIIIV, Wall::BlackIIII, Wall::QpWall];

    pub fn name(&self) -> &'static str {
        match self {
            Wall::TauOneGw => "TauOne_GW",
            Wall::BlueIII => "Blue_I_II",
            Wall::GreenIIIV => "Green_II_IV",
            Wall::RedIIIIV => "Red_III_IV",
            Wall::BlackIIII => "Black_I_III",
            Wall::QpWall => "QP_wall",
        }
    }

    /// Free energy along the unit normal through a representative wall point, u = 0 on the wall.
    fn profile(&self) -> Box<dyn Fn(f64) -> f64> {
        let along = |p0: (f64, f64), nrm: (f64, f64)| {
            let len = (nrm.0 * nrm.0 + nrm.1 * nrm.1).sqrt();
            let (a, b) = (nrm.0 / len, nrm.1 / len);
            move |u: f64| gw_finite(p0.0 + u * a, p0.1 + u * b)
        };
        match self {
            Wall::TauOneGw => Box::new(|u| gw_infinite(1.0 + u)),
            Wall::BlueIII => Box::new(along((0.5, 1.5), (-1.0, 1.0))),
            Wall::GreenIIIV => Box::new(along((1.0, 3.0), (1.0, 0.0))),
            Wall::RedIIIIV => Box::new(along((4.0, 4.0), (-0.5, 1.0))),
            Wall::BlackIIII => Box::new(along((1.0, 1.5), (1.0, 0.0))),
            Wall::QpWall => Box::new(|u| qp_finite(2.0 + u, 0.0)),
        }
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Steps used for the one-sided differences.
pub const TRANSITION_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeJump {
    pub order: usize,
    pub left: f64,
    pub right: f64,
    pub jump: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionReport {
    pub wall: Wall,
    pub order: usize,
    pub jumps: Vec<DerivativeJump>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// k-th one-sided derivative at 0 (dir = +1 right, -1 left) from forward differences at the
/// given steps, Richardson-extrapolated twice. Returns (estimate, error estimate).
fn one_sided_derivative(g: &dyn Fn(f64) -> f64, k: usize, dir: f64, steps: [f64; 3]) -> (f64, f64) {
    let diff = |h: f64| -> f64 {
        let s: f64 = (0..=k)
            .map(|i| {
                let sign = if (k - i).is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * binomial(k, i) * g(dir * i as f64 * h)
            })
            .sum();
        s / (dir * h).powi(k as i32)
    };
    let d: Vec<f64> = steps.iter().map(|&h| diff(h)).collect();
    let r1a = 2.0 * d[1] - d[0];
    let r1b = 2.0 * d[2] - d[1];
    let r2 = (4.0 * r1b - r1a) / 3.0;
    // rounding in a k-th difference scales like eps |g| / h^k
    let g0 = g(0.0).abs().max(1.0);
    let roundoff = 64.0 * f64::EPSILON * g0 * 2f64.powi(k as i32) / steps[2].powi(k as i32);
    (r2, (r2 - r1b).abs() + roundoff)
}

fn detect(g: &dyn Fn(f64) -> f64, steps: [f64; 3], max_order: usize) -> (Option<usize>, Vec<DerivativeJump>) {
    let mut jumps = Vec::new();
    let mut found = None;
    for k in 0..=max_order {
        let (r, er) = one_sided_derivative(g, k, 1.0, steps);
        let (l, el) = one_sided_derivative(g, k, -1.0, steps);
        let jump = r - l;
        let error = er + el;
        jumps.push(DerivativeJump { order: k, left: l, right: r, jump, error });
        if found.is_none() && jump.abs() > 10.0 * error && jump.abs() > 1e-6 * (1.0 + l.abs().max(r.abs())) {
            found = Some(k);
        }
    }
    (found, jumps)
}

/// Lowest derivative order with a jump across the wall.
///
/// The detection is repeated with all steps halved; disagreement is reported as inconclusive.
pub fn transition_order(wall: Wall) -> Result<TransitionReport> {
    const MAX_ORDER: usize = 4;
    let g = wall.profile();
    let (order, jumps) = detect(&*g, TRANSITION_STEPS, MAX_ORDER);
    let halved = TRANSITION_STEPS.map(|h| 0.5 * h);
    let (check, _) = detect(&*g, halved, MAX_ORDER);
    match (order, check) {
        (Some(a), Some(b)) if a == b => Ok(TransitionReport { wall, order: a, jumps }),
        (a, b) => Err(Error::Inconclusive(format!(
            "{wall}: detected order {a:?} at the base steps and {b:?} at half steps"
        ))),
    }
}
