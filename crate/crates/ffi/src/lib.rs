//! C interface to the anticyclo pipeline.
//!
//! A pipeline is built once with [`ac_pipeline_new`] and queried through
//! functions that return JSON strings. Strings returned by the library must be
//! released with [`ac_string_free`], pipelines with [`ac_pipeline_free`].
//! On failure the message is available from [`ac_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use anticyclo::pipeline::verify::verify;
use anticyclo::pipeline::{parse_characters, Pipeline, RunConfig};
use anticyclo::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    Hypothesis = 3,
    Unsupported = 4,
    Verification = 5,
    OracleNonConvergence = 6,
    Cache = 7,
    Io = 8,
    Panic = 9,
}

/// Opaque handle to a built pipeline.
pub struct AcPipeline {
    inner: Pipeline,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> AcStatus {
    match e {
        Error::InvalidInput(_) => AcStatus::InvalidInput,
        Error::Hypothesis(_) => AcStatus::Hypothesis,
        Error::Unsupported(_) => AcStatus::Unsupported,
        Error::Verification(_) => AcStatus::Verification,
        Error::OracleNonConvergence(_) => AcStatus::OracleNonConvergence,
        Error::Cache(_) => AcStatus::Cache,
        Error::Io(_) => AcStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (AcStatus, String)>) -> AcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside anticyclo".into());
            AcStatus::Panic
        }
    }
}

fn lib(e: Error) -> (AcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (AcStatus, String) {
    (AcStatus::NullArgument, format!("{what} is null"))
}

unsafe fn write_json<T: serde::Serialize>(value: &T, out: *mut *mut c_char) -> Result<(), (AcStatus, String)> {
    let s = serde_json::to_string(value).map_err(|e| lib(e.into()))?;
    let c = CString::new(s).map_err(|e| (AcStatus::InvalidInput, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn pipeline<'a>(pl: *const AcPipeline) -> Result<&'a Pipeline, (AcStatus, String)> {
    pl.as_ref().map(|p| &p.inner).ok_or_else(|| null("pipeline"))
}

/// Build a pipeline for the curve with coefficients `curve[0..5]`, prime `p`,
/// field discriminant `disc`, levels up to `n_max` and precision `prec`.
///
/// # Safety
/// `curve` must point to five readable integers and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_pipeline_new(
    curve: *const i64,
    p: u64,
    disc: i64,
    n_max: u32,
    prec: u32,
    out: *mut *mut AcPipeline,
) -> AcStatus {
    guard(|| {
        if curve.is_null() {
            return Err(null("curve"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let mut coeffs = [0i64; 5];
        coeffs.copy_from_slice(std::slice::from_raw_parts(curve, 5));
        let mut cfg = RunConfig::new(coeffs, p, disc);
        cfg.n_max = n_max;
        cfg.prec = prec;
        let inner = Pipeline::build(&cfg).map_err(lib)?;
        *out = Box::into_raw(Box::new(AcPipeline { inner }));
        Ok(())
    })
}

/// # Safety
/// `pl` must come from [`ac_pipeline_new`] and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ac_pipeline_free(pl: *mut AcPipeline) {
    if !pl.is_null() {
        drop(Box::from_raw(pl));
    }
}

/// # Safety
/// `pl` must be a live pipeline and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_analyze_json(pl: *const AcPipeline, out: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let pl = pipeline(pl)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_json(&pl.analysis(), out)
    })
}

/// Theta and L elements at level `n`.
///
/// # Safety
/// `pl` must be a live pipeline and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_theta_json(pl: *const AcPipeline, n: u32, out: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let pl = pipeline(pl)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_json(&pl.theta_output(n).map_err(lib)?, out)
    })
}

/// Runs the invariant suite. Returns `Verification` if any check fails; the
/// report is written to `out` in either case.
///
/// # Safety
/// `pl` must be a live pipeline and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_verify_json(pl: *const AcPipeline, out: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let pl = pipeline(pl)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let rep = verify(pl);
        write_json(&rep, out)?;
        if rep.pass {
            Ok(())
        } else {
            Err((AcStatus::Verification, "verification failed".into()))
        }
    })
}

/// Interpolation report. `chars_json` is a JSON list of `{"n", "k"}` objects,
/// or null for the default list.
///
/// # Safety
/// `pl` must be a live pipeline, `chars_json` null or a NUL-terminated string,
/// and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_report_json(
    pl: *const AcPipeline,
    chars_json: *const c_char,
    out: *mut *mut c_char,
) -> AcStatus {
    guard(|| {
        let pl = pipeline(pl)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let chars = if chars_json.is_null() {
            pl.default_report_characters().map_err(lib)?
        } else {
            let text = CStr::from_ptr(chars_json).to_str().map_err(|e| (AcStatus::InvalidInput, e.to_string()))?;
            parse_characters(text).map_err(lib)?
        };
        write_json(&pl.report(&chars).map_err(lib)?, out)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn ac_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
