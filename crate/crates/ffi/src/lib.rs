//! C ABI over `amo-core`.
//!
//! Every fallible call returns an [`AmoStatus`] and writes results through
//! out-pointers. On failure, [`amo_last_error_message`] describes the error
//! for the calling thread. Handles (`AmoSpectrum`, `AmoBands`, `AmoReport`)
//! are opaque; release each with its `_free` function. Strings returned as
//! `char *` are owned by the caller and released with [`amo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use amo_core::bounds::bound_table;
use amo_core::butterfly::bands;
use amo_core::certify::{certify, CertificateReport, CertifyConfig};
use amo_core::operator::{build_harper, norm_rational, CornerSign, Twist};
use amo_core::trial_vectors::{optimize_lower, Family};
use amo_core::Fraction;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidFraction = 2,
    InvalidArgument = 3,
    Numerical = 4,
    IndexOutOfRange = 5,
    Panic = 6,
}

/// Number of slots in [`AmoBounds`].
pub const AMO_BOUND_COUNT: usize = 9;

/// Bound values at one `(theta, lambda)`, in the order reported by
/// [`amo_bound_name`]. `present[i]` is false where bound `i` is not valid.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AmoBounds {
    pub theta: f64,
    pub lambda: f64,
    pub values: [f64; AMO_BOUND_COUNT],
    pub present: [bool; AMO_BOUND_COUNT],
}

/// Best trial-vector lower bound; `family` is 0, 1, 2 for x, y, z.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AmoLower {
    pub value: f64,
    pub alpha: f64,
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub family: i32,
}

/// Ascending eigenvalues of one twisted matrix.
pub struct AmoSpectrum {
    values: Vec<f64>,
}

/// Merged bands of one rational frequency.
pub struct AmoBands {
    bands: Vec<(f64, f64)>,
}

/// Certification report.
pub struct AmoReport {
    report: CertificateReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn fail(status: AmoStatus, msg: impl Into<String>) -> AmoStatus {
    set_error(msg);
    status
}

/// Runs `f`, mapping panics to [`AmoStatus::Panic`] and clearing the error
/// slot on success.
fn guard(f: impl FnOnce() -> AmoStatus) -> AmoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(AmoStatus::Ok) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AmoStatus::Ok
        }
        Ok(s) => s,
        Err(_) => fail(AmoStatus::Panic, "internal panic"),
    }
}

fn fraction(p: u64, q: u64) -> Result<Fraction, AmoStatus> {
    Fraction::new(p, q).map_err(|e| fail(AmoStatus::InvalidFraction, e.to_string()))
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next `amo_*` call on the same thread.
#[no_mangle]
pub extern "C" fn amo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn amo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Static name of bound slot `index`, or NULL when out of range.
#[no_mangle]
pub extern "C" fn amo_bound_name(index: usize) -> *const c_char {
    const NAMES: [&CStr; AMO_BOUND_COUNT] = [
        c"upper_bvz",
        c"upper_sqrt",
        c"upper_M0",
        c"upper_M1",
        c"upper_sz",
        c"lower_f1",
        c"lower_f2",
        c"lower_f3",
        c"lower_m",
    ];
    NAMES.get(index).map_or(ptr::null(), |s| s.as_ptr())
}

/// Operator norm at `theta = p/q`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn amo_norm_rational(p: u64, q: u64, lambda: f64, out: *mut f64) -> AmoStatus {
    guard(|| {
        if out.is_null() {
            return fail(AmoStatus::NullPointer, "out is NULL");
        }
        let f = match fraction(p, q) {
            Ok(f) => f,
            Err(s) => return s,
        };
        match norm_rational(f, lambda) {
            Ok(v) => {
                *out = v;
                AmoStatus::Ok
            }
            Err(e) => fail(AmoStatus::Numerical, e.to_string()),
        }
    })
}

/// Closed-form bounds at `theta ∈ [0, 1/2]`.
///
/// # Safety
/// `out` must be NULL or valid for writing one `AmoBounds`.
#[no_mangle]
pub unsafe extern "C" fn amo_bounds(theta: f64, lambda: f64, out: *mut AmoBounds) -> AmoStatus {
    guard(|| {
        if out.is_null() {
            return fail(AmoStatus::NullPointer, "out is NULL");
        }
        let set = match bound_table(theta, lambda) {
            Ok(s) => s,
            Err(e) => return fail(AmoStatus::InvalidArgument, e.to_string()),
        };
        let mut b = AmoBounds {
            theta,
            lambda,
            values: [f64::NAN; AMO_BOUND_COUNT],
            present: [false; AMO_BOUND_COUNT],
        };
        for (i, (_, v)) in set.entries().iter().enumerate() {
            if let Some(v) = v {
                b.values[i] = *v;
                b.present[i] = true;
            }
        }
        *out = b;
        AmoStatus::Ok
    })
}

/// Best trial-vector lower bound at real `theta ∈ [0, 1/2]` (`λ = 2`).
///
/// # Safety
/// `out` must be NULL or valid for writing one `AmoLower`.
#[no_mangle]
pub unsafe extern "C" fn amo_lower_optimize(theta: f64, out: *mut AmoLower) -> AmoStatus {
    guard(|| {
        if out.is_null() {
            return fail(AmoStatus::NullPointer, "out is NULL");
        }
        match optimize_lower(theta) {
            Ok(e) => {
                *out = AmoLower {
                    value: e.value,
                    alpha: e.params.alpha,
                    r: e.params.r,
                    a: e.params.a,
                    b: e.params.b,
                    family: match e.family {
                        Family::X => 0,
                        Family::Y => 1,
                        Family::Z => 2,
                    },
                };
                AmoStatus::Ok
            }
            Err(e) => fail(AmoStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Eigenvalues at `theta = p/q` with twist `(phi, omega)`, `omega = ±1`.
///
/// # Safety
/// `out` must be NULL or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn amo_spectrum_new(
    p: u64,
    q: u64,
    lambda: f64,
    phi: f64,
    omega: i32,
    out: *mut *mut AmoSpectrum,
) -> AmoStatus {
    guard(|| {
        if out.is_null() {
            return fail(AmoStatus::NullPointer, "out is NULL");
        }
        let f = match fraction(p, q) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let Some(omega) = CornerSign::from_sign(omega) else {
            return fail(AmoStatus::InvalidArgument, "omega must be 1 or -1");
        };
        match build_harper(f, lambda, Twist { phi, omega }).spectrum() {
            Ok(s) => {
                *out = Box::into_raw(Box::new(AmoSpectrum { values: s.eigenvalues }));
                AmoStatus::Ok
            }
            Err(e) => fail(AmoStatus::Numerical, e.to_string()),
        }
    })
}

/// Number of eigenvalues; 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle from [`amo_spectrum_new`].
#[no_mangle]
pub unsafe extern "C" fn amo_spectrum_len(h: *const AmoSpectrum) -> usize {
    h.as_ref().map_or(0, |s| s.values.len())
}

/// # Safety
/// `h` must be NULL or a live handle; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn amo_spectrum_get(h: *const AmoSpectrum, index: usize, out: *mut f64) -> AmoStatus {
    guard(|| {
        let (Some(s), false) = (h.as_ref(), out.is_null()) else {
            return fail(AmoStatus::NullPointer, "handle or out is NULL");
        };
        match s.values.get(index) {
            Some(v) => {
                *out = *v;
                AmoStatus::Ok
            }
            None => fail(
                AmoStatus::IndexOutOfRange,
                format!("index {index} >= {}", s.values.len()),
            ),
        }
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`amo_spectrum_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn amo_spectrum_free(h: *mut AmoSpectrum) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Merged band spectrum at `theta = p/q`.
///
/// # Safety
/// `out` must be NULL or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn amo_bands_new(p: u64, q: u64, lambda: f64, out: *mut *mut AmoBands) -> AmoStatus {
    guard(|| {
        if out.is_null() {
            return fail(AmoStatus::NullPointer, "out is NULL");
        }
        let f = match fraction(p, q) {
            Ok(f) => f,
            Err(s) => return s,
        };
        match bands(f, lambda) {
            Ok(s) => {
                let bands = s.bands.iter().map(|b| (b.lo, b.hi)).collect();
                *out = Box::into_raw(Box::new(AmoBands { bands }));
                AmoStatus::Ok
            }
            Err(e) => fail(AmoStatus::Numerical, e.to_string()),
        }
    })
}

/// Number of bands; 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle from [`amo_bands_new`].
#[no_mangle]
pub unsafe extern "C" fn amo_bands_len(h: *const AmoBands) -> usize {
    h.as_ref().map_or(0, |b| b.bands.len())
}

/// # Safety
/// `h` must be NULL or a live handle; `lo` and `hi` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn amo_bands_get(h: *const AmoBands, index: usize, lo: *mut f64, hi: *mut f64) -> AmoStatus {
    guard(|| {
        let (Some(b), false, false) = (h.as_ref(), lo.is_null(), hi.is_null()) else {
            return fail(AmoStatus::NullPointer, "handle, lo or hi is NULL");
        };
        match b.bands.get(index) {
            Some(&(l, h)) => {
                *lo = l;
                *hi = h;
                AmoStatus::Ok
            }
            None => fail(
                AmoStatus::IndexOutOfRange,
                format!("index {index} >= {}", b.bands.len()),
            ),
        }
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`amo_bands_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn amo_bands_free(h: *mut AmoBands) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Sandwich sweep over `q ≤ q_max` and the given couplings. With
/// `with_constants`, also reproduces the named constants and runs the
/// Hölder check.
///
/// # Safety
/// `lambdas` must be valid for reading `n_lambdas` doubles (or NULL when
/// `n_lambdas == 0`); `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn amo_certify_new(
    q_max: u64,
    lambdas: *const f64,
    n_lambdas: usize,
    with_constants: bool,
    out: *mut *mut AmoReport,
) -> AmoStatus {
    guard(|| {
        if out.is_null() || (lambdas.is_null() && n_lambdas > 0) {
            return fail(AmoStatus::NullPointer, "out or lambdas is NULL");
        }
        if q_max == 0 {
            return fail(AmoStatus::InvalidArgument, "q_max must be at least 1");
        }
        let ls = if n_lambdas == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(lambdas, n_lambdas).to_vec()
        };
        let config = CertifyConfig {
            q_max,
            lambdas: ls,
            constants: with_constants,
            holder: with_constants.then_some(amo_core::certify::HOLDER_C),
            explore: None,
        };
        match certify(&config) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(AmoReport { report }));
                AmoStatus::Ok
            }
            Err(e) => fail(AmoStatus::Numerical, e.to_string()),
        }
    })
}

/// # Safety
/// `h` must be NULL or a live handle from [`amo_certify_new`].
#[no_mangle]
pub unsafe extern "C" fn amo_report_record_count(h: *const AmoReport) -> usize {
    h.as_ref().map_or(0, |r| r.report.records.len())
}

/// # Safety
/// `h` must be NULL or a live handle from [`amo_certify_new`].
#[no_mangle]
pub unsafe extern "C" fn amo_report_failure_count(h: *const AmoReport) -> usize {
    h.as_ref().map_or(0, |r| r.report.failures.len())
}

/// True when no record failed and every constant check passed; false for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle from [`amo_certify_new`].
#[no_mangle]
pub unsafe extern "C" fn amo_report_passed(h: *const AmoReport) -> bool {
    h.as_ref().is_some_and(|r| r.report.passed())
}

/// The report as JSON; free with [`amo_string_free`]. NULL for a NULL handle.
///
/// # Safety
/// `h` must be NULL or a live handle from [`amo_certify_new`].
#[no_mangle]
pub unsafe extern "C" fn amo_report_json(h: *const AmoReport) -> *mut c_char {
    h.as_ref()
        .and_then(|r| CString::new(r.report.to_json()).ok())
        .map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `h` must be NULL or a handle from [`amo_certify_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn amo_report_free(h: *mut AmoReport) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn amo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
