//! C ABI over the xx0 library.
//!
//! Every function returns an `Xx0Status`; results come back through out-pointers. On failure
//! `xx0_last_error()` gives a message for the calling thread. Tracy-Widom evaluators are opaque
//! handles owned by the caller and released with `xx0_tw_evaluator_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use xx0::partition::{
    free_energy_finite, partition_gw_finite, partition_gw_infinite, partition_qp_finite, ratio_to_tw,
    width_probability_exact, Model, ModelParams,
};
use xx0::phase::{classify, Region};
use xx0::tracywidom::{solve_hastings_mcleod, tw_cdf_fredholm, TwEvaluator};
use xx0::validation::{run_suite, Suite};
use xx0::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Xx0Status {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    InvalidArgument = 3,
    Divergence = 4,
    NonConvergence = 5,
    Truncation = 6,
    Overflow = 7,
    DimensionOverflow = 8,
    IllConditioned = 9,
    Inconclusive = 10,
    AttemptsExhausted = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Xx0Model {
    GrossWitten = 0,
    Gaussian = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Xx0Region {
    I = 1,
    II = 2,
    III = 3,
    IV = 4,
    QpI = 5,
    QpII = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Xx0Suite {
    Oracle = 0,
    Mc = 1,
    Tw = 2,
    All = 3,
}

/// log|value| and its sign (+1/-1); a vanishing determinant has log_abs = -inf.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Xx0LogDet {
    pub log_abs: f64,
    pub sign: i8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Xx0PhasePoint {
    pub region: Xx0Region,
    pub free_energy: f64,
    pub wall_distance: f64,
}

/// Opaque Painleve II solution used for Tracy-Widom evaluation.
pub struct Xx0TwEvaluator {
    inner: TwEvaluator,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> Xx0Status {
    match e {
        Error::Domain(_) => Xx0Status::Domain,
        Error::InvalidArgument(_) => Xx0Status::InvalidArgument,
        Error::Divergence(_) => Xx0Status::Divergence,
        Error::NonConvergence(_) => Xx0Status::NonConvergence,
        Error::Truncation(_) => Xx0Status::Truncation,
        Error::Overflow(_) => Xx0Status::Overflow,
        Error::DimensionOverflow { .. } => Xx0Status::DimensionOverflow,
        Error::IllConditioned(_) => Xx0Status::IllConditioned,
        Error::Inconclusive(_) => Xx0Status::Inconclusive,
        Error::AttemptsExhausted { .. } => Xx0Status::AttemptsExhausted,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> Xx0Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            Xx0Status::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            Xx0Status::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {msg}"));
            Xx0Status::Panic
        }
    }
}

/// Write `v` through `out`, failing on null.
unsafe fn put<T>(out: *mut T, v: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(v);
    Ok(())
}

fn model_of(m: Xx0Model) -> Model {
    match m {
        Xx0Model::GrossWitten => Model::Gw,
        Xx0Model::Gaussian => Model::Qp,
    }
}

fn region_of(r: Region) -> Xx0Region {
    match r {
        Region::I => Xx0Region::I,
        Region::II => Xx0Region::II,
        Region::III => Xx0Region::III,
        Region::IV => Xx0Region::IV,
        Region::QpI => Xx0Region::QpI,
        Region::QpII => Xx0Region::QpII,
    }
}

/// Message describing the last failure on this thread; empty after a success. The pointer stays
/// valid until the next xx0 call on the same thread.
#[no_mangle]
pub extern "C" fn xx0_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xx0_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Solve Painleve II on [grid_lo, grid_hi] with the given step. Pass grid_lo = grid_hi = step = 0
/// for the default grid.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn xx0_tw_evaluator_new(
    grid_lo: f64,
    grid_hi: f64,
    step: f64,
    out: *mut *mut Xx0TwEvaluator,
) -> Xx0Status {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let inner = if grid_lo == 0.0 && grid_hi == 0.0 && step == 0.0 {
            TwEvaluator::standard().clone()
        } else {
            solve_hastings_mcleod(grid_lo, grid_hi, step)?
        };
        put(out, Box::into_raw(Box::new(Xx0TwEvaluator { inner })), "out")
    })
}

/// Release an evaluator; null is a no-op.
///
/// # Safety
/// `ev` must come from `xx0_tw_evaluator_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xx0_tw_evaluator_free(ev: *mut Xx0TwEvaluator) {
    if !ev.is_null() {
        drop(Box::from_raw(ev));
    }
}

/// F(x) from the evaluator.
///
/// # Safety
/// `ev` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xx0_tw_cdf(ev: *const Xx0TwEvaluator, x: f64, out: *mut f64) -> Xx0Status {
    guard(|| {
        let ev = ev.as_ref().ok_or(Fail::Null("ev"))?;
        put(out, ev.inner.cdf(x), "out")
    })
}

/// 1 - F(x) without cancellation on the right.
///
/// # Safety
/// `ev` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xx0_tw_sf(ev: *const Xx0TwEvaluator, x: f64, out: *mut f64) -> Xx0Status {
    guard(|| {
        let ev = ev.as_ref().ok_or(Fail::Null("ev"))?;
        put(out, ev.inner.sf(x), "out")
    })
}

/// F(x) as a Fredholm determinant of the Airy kernel with Gauss-Legendre order `quad_order`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xx0_tw_cdf_fredholm(x: f64, quad_order: usize, out: *mut f64) -> Xx0Status {
    guard(|| put(out, tw_cdf_fredholm(x, quad_order)?, "out"))
}

/// log D_{n_f}(f_GW) on the full circle.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xx0_partition_gw_infinite(n_f: u32, t: f64, out: *mut Xx0LogDet) -> Xx0Status {
    guard(|| {
        let p = ModelParams::new(n_f.max(1), n_f, t)?;
        let d = partition_gw_infinite(&p)?;
        put(out, Xx0LogDet { log_abs: d.log_abs, sign: d.sign }, "out")
    })
}

/// log D^{|d|}_{n_f}(f_GW) on the roots of z^N = s with s = s_re + i s_im on the unit circle.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xx0_partition_gw_finite(
    n: u32,
    n_f: u32,
    t: f64,
    s_re: f64,
    s_im: f64,
    out: *mut Xx0LogDet,
) -> Xx0Status {
    guard(|| {
        let p = ModelParams::new(n, n_f, t)?;
        let d = partition_gw_finite(&p, Complex64::new(s_re, s_im))?;
        put(out, Xx0LogDet { log_abs: d.log_abs, sign: d.sign }, "out")
    })
}

/// log of the discrete Gaussian Hankel determinant on N lattice points.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xx0_partition_qp_finite(n: u32, n_f: u32, out: *mut Xx0LogDet) -> Xx0Status {
    guard(|| {
        let p = ModelParams::new(n, n_f, 0.0)?;
        let d = partition_qp_finite(&p)?;
        put(out, Xx0LogDet { log_abs: d.log_abs, sign: d.sign }, "out")
    })
}

/// (1/N_f^2) log Z for the finite model.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xx0_free_energy_finite(
    model: Xx0Model,
    n: u32,
    n_f: u32,
    t: f64,
    out: *mut f64,
) -> Xx0Status {
    guard(|| {
        let p = ModelParams::new(n, n_f, t)?;
        put(out, free_energy_finite(&p, model_of(model))?, "out")
    })
}

/// Normalised ratio c Z^{|d|}/Z and the Tracy-Widom value at the matching argument.
///
/// # Safety
/// `ev` must be a live handle; `out_ratio`, `out_x` and `out_f` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xx0_ratio_to_tw(
    model: Xx0Model,
    n: u32,
    n_f: u32,
    t: f64,
    ev: *const Xx0TwEvaluator,
    out_ratio: *mut f64,
    out_x: *mut f64,
    out_f: *mut f64,
) -> Xx0Status {
    guard(|| {
        let ev = ev.as_ref().ok_or(Fail::Null("ev"))?;
        let p = ModelParams::new(n, n_f, t)?;
        let r = ratio_to_tw(&p, model_of(model), &ev.inner)?;
        put(out_ratio, r.ratio, "out_ratio")?;
        put(out_x, r.x, "out_x")?;
        put(out_f, r.f_of_x, "out_f")
    })
}

/// P(W < N) for n_f nonintersecting bridges over time t.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xx0_width_probability(n_f: u32, t: f64, n: u32, out: *mut f64) -> Xx0Status {
    guard(|| put(out, width_probability_exact(n_f, t, n)?, "out"))
}

/// Region, free energy and wall distance at (tau, n_inv) in the finite Gross-Witten model.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xx0_classify(tau: f64, n_inv: f64, out: *mut Xx0PhasePoint) -> Xx0Status {
    guard(|| {
        let p = classify(tau, n_inv)?;
        put(
            out,
            Xx0PhasePoint { region: region_of(p.region), free_energy: p.free_energy, wall_distance: p.wall_distance },
            "out",
        )
    })
}

/// Run a validation suite. `out_pass` receives 1 when every criterion passed. If `out_json` is
/// non-null it receives the report as a JSON string to be released with `xx0_string_free`.
///
/// # Safety
/// `out_pass` must be valid for writes; `out_json` null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn xx0_validate(
    suite: Xx0Suite,
    seed: u64,
    out_pass: *mut i32,
    out_json: *mut *mut c_char,
) -> Xx0Status {
    guard(|| {
        let suite = match suite {
            Xx0Suite::Oracle => Suite::Oracle,
            Xx0Suite::Mc => Suite::Mc,
            Xx0Suite::Tw => Suite::Tw,
            Xx0Suite::All => Suite::All,
        };
        let report = run_suite(suite, seed);
        put(out_pass, report.pass as i32, "out_pass")?;
        if !out_json.is_null() {
            let text = xx0::cli::to_json(&report);
            out_json.write(CString::new(text).unwrap_or_default().into_raw());
        }
        Ok(())
    })
}

/// Free a string returned by this library; null is a no-op.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xx0_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
