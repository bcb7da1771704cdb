//! C interface to `algebragen`.
//!
//! Generator sets are opaque handles created from instance JSON. Every call
//! returns an [`AgStatus`]; on failure [`ag_last_error_message`] describes
//! the error for the calling thread. Strings returned through out-pointers
//! are owned by the caller and released with [`ag_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use algebragen::algebra;
use algebragen::instance::{candidate_from_json, format_grid, Field, Instance, InstanceFile, ParseEntry};
use algebragen::{modp, Error, GeneratorSet, Scalar};
use serde_json::json;

/// Status codes. Positive values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgStatus {
    Ok = 0,
    Parse = 2,
    NormBound = 3,
    Numeric = 4,
    OutOfRange = 5,
    NullPointer = -1,
    InvalidUtf8 = -2,
    Panic = -3,
}

/// Opaque generator set.
pub struct AgGeneratorSet {
    inner: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> AgStatus {
    match e.exit_code() {
        3 => AgStatus::NormBound,
        4 => AgStatus::Numeric,
        5 => AgStatus::OutOfRange,
        _ => AgStatus::Parse,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), AgStatus>) -> AgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            AgStatus::Panic
        }
    }
}

fn fail(e: Error) -> AgStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, AgStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        return Err(AgStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        AgStatus::InvalidUtf8
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

fn handle<'a>(set: *const AgGeneratorSet) -> Result<&'a AgGeneratorSet, AgStatus> {
    if set.is_null() {
        set_error("null generator set");
        return Err(AgStatus::NullPointer);
    }
    Ok(unsafe { &*set })
}

/// Parses instance JSON. `field` may be null to use the file's field.
///
/// # Safety
/// `json` and a non-null `field` must be NUL-terminated strings; `out` must
/// be a valid pointer. The handle is released with [`ag_generator_set_free`].
#[no_mangle]
pub unsafe extern "C" fn ag_generator_set_from_json(
    json: *const c_char,
    field: *const c_char,
    out: *mut *mut AgGeneratorSet,
) -> AgStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return Err(AgStatus::NullPointer);
        }
        let text = read_str(json)?;
        let field = if field.is_null() {
            None
        } else {
            Some(read_str(field)?.parse::<Field>().map_err(fail)?)
        };
        let inner = InstanceFile::from_json(text)
            .and_then(|f| f.resolve(field, None))
            .map_err(fail)?;
        *out = Box::into_raw(Box::new(AgGeneratorSet { inner }));
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a handle from [`ag_generator_set_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ag_generator_set_free(set: *mut AgGeneratorSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Matrix size `n`, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ag_generator_set_size(set: *const AgGeneratorSet) -> usize {
    if set.is_null() {
        0
    } else {
        (*set).inner.n()
    }
}

macro_rules! with_set {
    ($inst:expr, $gs:ident => $body:expr) => {
        match $inst {
            Instance::F64($gs) => $body,
            Instance::C64($gs) => $body,
            Instance::Rational($gs) => $body,
            Instance::Gfp { set: $gs, .. } => $body,
        }
    };
}

/// Dimension of the generated algebra.
///
/// # Safety
/// `set` must be a live handle and `out_dim` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ag_dimension(set: *const AgGeneratorSet, out_dim: *mut usize) -> AgStatus {
    guard(|| {
        let h = handle(set)?;
        if out_dim.is_null() {
            set_error("null output pointer");
            return Err(AgStatus::NullPointer);
        }
        let opts = h.inner.default_options().map_err(fail)?;
        let dim = with_set!(&h.inner, gs => algebra::dimension_with(gs, &opts)).map_err(fail)?;
        *out_dim = dim;
        Ok(())
    })
}

fn membership_report<T: ParseEntry>(
    gs: &GeneratorSet<T>,
    candidate: &str,
    want_certificate: bool,
    opts: &algebra::AlgebraOptions,
) -> Result<(bool, String), Error> {
    let z = candidate_from_json::<T>(candidate, gs.n(), gs.ctx())?;
    let res = algebra::membership_with(gs, &z, want_certificate, opts)?;
    let report = json!({
        "member": res.member,
        "residual": res.residual,
        "certificate": res.certificate.map(|c| c.to_terms()),
        "certificate_error": res.certificate_error,
    });
    Ok((res.member, report.to_string()))
}

/// Membership of a candidate given as JSON (a grid or `{"matrix": grid}`).
/// `out_member` receives 1 or 0; `out_report`, if non-null, receives a JSON
/// report with the residual and optional certificate.
///
/// # Safety
/// `set` must be a live handle, `candidate_json` a NUL-terminated string,
/// `out_member` valid, and `out_report` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ag_membership_json(
    set: *const AgGeneratorSet,
    candidate_json: *const c_char,
    want_certificate: bool,
    out_member: *mut i32,
    out_report: *mut *mut c_char,
) -> AgStatus {
    guard(|| {
        let h = handle(set)?;
        let text = read_str(candidate_json)?;
        if out_member.is_null() {
            set_error("null output pointer");
            return Err(AgStatus::NullPointer);
        }
        let opts = h.inner.default_options().map_err(fail)?;
        let (member, report) =
            with_set!(&h.inner, gs => membership_report(gs, text, want_certificate, &opts)).map_err(fail)?;
        *out_member = member as i32;
        if !out_report.is_null() {
            *out_report = into_c_string(report);
        }
        Ok(())
    })
}

fn basis_report<T: Scalar>(gs: &GeneratorSet<T>, opts: &algebra::AlgebraOptions) -> Result<String, Error> {
    let b = algebra::basis_with(gs, opts)?;
    Ok(json!({
        "dimension": b.dim,
        "basis": b.basis.iter().map(format_grid).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Basis as JSON: `{"dimension": d, "basis": [grid, ...]}`.
///
/// # Safety
/// `set` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ag_basis_json(set: *const AgGeneratorSet, out_json: *mut *mut c_char) -> AgStatus {
    guard(|| {
        let h = handle(set)?;
        if out_json.is_null() {
            set_error("null output pointer");
            return Err(AgStatus::NullPointer);
        }
        let opts = h.inner.default_options().map_err(fail)?;
        let report = with_set!(&h.inner, gs => basis_report(gs, &opts)).map_err(fail)?;
        *out_json = into_c_string(report);
        Ok(())
    })
}

/// Randomized exact dimension of a rational instance via random primes.
/// `out_failure_bound` may be null.
///
/// # Safety
/// `instance_json` must be a NUL-terminated string, `out_dim` valid, and
/// `out_failure_bound` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ag_modp_dimension(
    instance_json: *const c_char,
    trials: usize,
    seed: u64,
    out_dim: *mut usize,
    out_failure_bound: *mut f64,
) -> AgStatus {
    guard(|| {
        let text = read_str(instance_json)?;
        if out_dim.is_null() {
            set_error("null output pointer");
            return Err(AgStatus::NullPointer);
        }
        let gs = InstanceFile::from_json(text)
            .and_then(|f| f.rational_set(None))
            .and_then(|g| modp::clear_denominators(&g))
            .map_err(fail)?;
        let (dim, plan) = modp::certified_dimension(&gs, trials, seed).map_err(fail)?;
        *out_dim = dim;
        if !out_failure_bound.is_null() {
            *out_failure_bound = plan.failure_probability_bound;
        }
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ag_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ag_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
