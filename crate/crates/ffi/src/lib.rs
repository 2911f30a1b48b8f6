//! C ABI over the forcinglab library: opaque tournament handles, status
//! codes, and string results that the caller releases with
//! `flab_string_free`. Every entry point catches panics and reports them as
//! `FLAB_STATUS_INTERNAL_ERROR` instead of unwinding across the boundary.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use forcinglab::catalog::catalog;
use forcinglab::certify::{classify_five_vertex, classify_six_vertex, verify, Certificate};
use forcinglab::rational::format_rat;
use forcinglab::subcount::{count_copies, expected_density};
use forcinglab::sympoly::{d_star_poly, matrix_by_name};
use forcinglab::tournament::Tournament;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FlabStatus {
    /// Success; for `flab_verify_certificate` this means the certificate was
    /// accepted.
    FlabStatusOk = 0,
    /// A required pointer argument was null.
    FlabStatusNullArgument = 1,
    /// A string argument was not valid UTF-8.
    FlabStatusInvalidUtf8 = 2,
    /// A tournament code or certificate failed to parse.
    FlabStatusParseError = 3,
    /// An unknown catalog or matrix name.
    FlabStatusUnknownName = 4,
    /// A size bound was violated (pattern/host/order limits).
    FlabStatusBounds = 5,
    /// The requested check ran but the claim was not established.
    FlabStatusRejected = 6,
    /// An internal invariant failed.
    FlabStatusInternalError = 7,
}

use FlabStatus::*;

/// Opaque tournament handle; create with `flab_tournament_parse` or
/// `flab_tournament_from_catalog`, release with `flab_tournament_free`.
pub struct FlabTournament {
    inner: Tournament,
}

fn guard(body: impl FnOnce() -> FlabStatus) -> FlabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => FlabStatusInternalError,
    }
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, FlabStatus> {
    if text.is_null() {
        return Err(FlabStatusNullArgument);
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| FlabStatusInvalidUtf8)
}

fn write_string(out: *mut *mut c_char, value: String) -> FlabStatus {
    if out.is_null() {
        return FlabStatusNullArgument;
    }
    match CString::new(value) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            FlabStatusOk
        }
        Err(_) => FlabStatusInternalError,
    }
}

unsafe fn handle<'a>(t: *const FlabTournament) -> Result<&'a Tournament, FlabStatus> {
    if t.is_null() {
        Err(FlabStatusNullArgument)
    } else {
        Ok(&(*t).inner)
    }
}

/// Returns the library version as a static string; do not free it.
#[no_mangle]
pub extern "C" fn flab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses an upper-triangle code such as "0010,001,00,0" into a handle.
///
/// # Safety
/// `code` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flab_tournament_parse(
    code: *const c_char,
    out: *mut *mut FlabTournament,
) -> FlabStatus {
    guard(|| {
        if out.is_null() {
            return FlabStatusNullArgument;
        }
        let text = match read_str(code) {
            Ok(t) => t,
            Err(e) => return e,
        };
        match Tournament::parse_code(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FlabTournament { inner }));
                FlabStatusOk
            }
            Err(_) => FlabStatusParseError,
        }
    })
}

/// Resolves a catalog name such as "S_7", "H_6^9" or "T_4" into a handle.
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flab_tournament_from_catalog(
    name: *const c_char,
    out: *mut *mut FlabTournament,
) -> FlabStatus {
    guard(|| {
        if out.is_null() {
            return FlabStatusNullArgument;
        }
        let text = match read_str(name) {
            Ok(t) => t,
            Err(e) => return e,
        };
        match catalog(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FlabTournament { inner }));
                FlabStatusOk
            }
            Err(_) => FlabStatusUnknownName,
        }
    })
}

/// Releases a tournament handle; null is a no-op.
///
/// # Safety
/// `t` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn flab_tournament_free(t: *mut FlabTournament) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Releases a string produced by this library; null is a no-op.
///
/// # Safety
/// `s` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn flab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of vertices, or -1 for a null handle.
///
/// # Safety
/// `t` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn flab_tournament_order(t: *const FlabTournament) -> i32 {
    match handle(t) {
        Ok(inner) => inner.vertex_count() as i32,
        Err(_) => -1,
    }
}

/// 1 if transitive, 0 if not, -1 for a null handle.
///
/// # Safety
/// `t` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn flab_tournament_is_transitive(t: *const FlabTournament) -> i32 {
    match handle(t) {
        Ok(inner) => inner.is_transitive() as i32,
        Err(_) => -1,
    }
}

/// 1 if strongly connected, 0 if not, -1 for a null handle.
///
/// # Safety
/// `t` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn flab_tournament_is_strongly_connected(t: *const FlabTournament) -> i32 {
    match handle(t) {
        Ok(inner) => inner.is_strongly_connected() as i32,
        Err(_) => -1,
    }
}

/// 1 if some pair of vertices are twins, 0 if not, -1 for a null handle.
///
/// # Safety
/// `t` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn flab_tournament_has_twins(t: *const FlabTournament) -> i32 {
    match handle(t) {
        Ok(inner) => inner.has_twins() as i32,
        Err(_) => -1,
    }
}

/// Writes the automorphism count (tournaments up to 10 vertices).
///
/// # Safety
/// `t` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flab_tournament_automorphism_count(
    t: *const FlabTournament,
    out: *mut u64,
) -> FlabStatus {
    guard(|| {
        let inner = match handle(t) {
            Ok(i) => i,
            Err(e) => return e,
        };
        if out.is_null() {
            return FlabStatusNullArgument;
        }
        if inner.vertex_count() > 10 {
            return FlabStatusBounds;
        }
        *out = inner.automorphism_count();
        FlabStatusOk
    })
}

/// Writes the upper-triangle code of the handle's labeling.
///
/// # Safety
/// `t` must be a live handle; `out` receives a string to free with
/// `flab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn flab_tournament_code(
    t: *const FlabTournament,
    out: *mut *mut c_char,
) -> FlabStatus {
    guard(|| match handle(t) {
        Ok(inner) => write_string(out, inner.format_code()),
        Err(e) => e,
    })
}

/// Writes the lexicographically minimal code over all relabelings
/// (tournaments up to 8 vertices).
///
/// # Safety
/// `t` must be a live handle; `out` receives a string to free with
/// `flab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn flab_tournament_canonical_code(
    t: *const FlabTournament,
    out: *mut *mut c_char,
) -> FlabStatus {
    guard(|| {
        let inner = match handle(t) {
            Ok(i) => i,
            Err(e) => return e,
        };
        if inner.vertex_count() > 8 {
            return FlabStatusBounds;
        }
        write_string(out, inner.canonical_code().to_string())
    })
}

/// Writes the number of induced copies of `pattern` in `host`.
///
/// # Safety
/// Both handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flab_count_copies(
    pattern: *const FlabTournament,
    host: *const FlabTournament,
    out: *mut u64,
) -> FlabStatus {
    guard(|| {
        let (p, h) = match (handle(pattern), handle(host)) {
            (Ok(p), Ok(h)) => (p, h),
            _ => return FlabStatusNullArgument,
        };
        if out.is_null() {
            return FlabStatusNullArgument;
        }
        match count_copies(p, h) {
            Ok(n) => {
                *out = n;
                FlabStatusOk
            }
            Err(_) => FlabStatusBounds,
        }
    })
}

/// Writes the expected density of the pattern in a uniformly random
/// tournament as a reduced fraction string.
///
/// # Safety
/// `t` must be a live handle; `out` receives a string to free with
/// `flab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn flab_expected_density(
    t: *const FlabTournament,
    out: *mut *mut c_char,
) -> FlabStatus {
    guard(|| {
        let inner = match handle(t) {
            Ok(i) => i,
            Err(e) => return e,
        };
        if inner.vertex_count() > 7 {
            return FlabStatusBounds;
        }
        write_string(out, format_rat(expected_density(inner).value()))
    })
}

/// Writes d*(pattern, matrix) as a polynomial string for matrix name "A_x",
/// "B_x" or "C_x".
///
/// # Safety
/// `t` must be a live handle; `matrix` NUL-terminated; `out` receives a
/// string to free with `flab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn flab_density_polynomial(
    t: *const FlabTournament,
    matrix: *const c_char,
    out: *mut *mut c_char,
) -> FlabStatus {
    guard(|| {
        let inner = match handle(t) {
            Ok(i) => i,
            Err(e) => return e,
        };
        let name = match read_str(matrix) {
            Ok(n) => n,
            Err(e) => return e,
        };
        let m = match matrix_by_name(name) {
            Ok(m) => m,
            Err(_) => return FlabStatusUnknownName,
        };
        match d_star_poly(inner, &m) {
            Ok(p) => write_string(out, p.to_string()),
            Err(_) => FlabStatusBounds,
        }
    })
}

/// Runs the full classification for n = 5 or n = 6 and writes it as a JSON
/// document with `rows` and `certificates` arrays.
///
/// # Safety
/// `out` receives a string to free with `flab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn flab_classify(n: u32, out: *mut *mut c_char) -> FlabStatus {
    guard(|| {
        let classification = match n {
            5 => classify_five_vertex(),
            6 => classify_six_vertex(),
            _ => return FlabStatusBounds,
        };
        match classification {
            Ok(c) => write_string(out, c.to_json()),
            Err(_) => FlabStatusInternalError,
        }
    })
}

/// Re-checks one certificate JSON object from scratch. Returns
/// `FLAB_STATUS_OK` when accepted and `FLAB_STATUS_REJECTED` when the
/// recomputation disagrees; when `trace` is non-null it receives the
/// verification trace (free with `flab_string_free`).
///
/// # Safety
/// `json` must be NUL-terminated; `trace` may be null.
#[no_mangle]
pub unsafe extern "C" fn flab_verify_certificate(
    json: *const c_char,
    trace: *mut *mut c_char,
) -> FlabStatus {
    guard(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(e) => return e,
        };
        let cert: Certificate = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(_) => return FlabStatusParseError,
        };
        let report = verify(&cert);
        if !trace.is_null() {
            let mut lines = report.checks.clone();
            if let Some(failure) = &report.failure {
                lines.push(format!("failure: {failure}"));
            }
            let status = write_string(trace, lines.join("\n"));
            if status != FlabStatusOk {
                return status;
            }
        }
        if report.accepted {
            FlabStatusOk
        } else {
            FlabStatusRejected
        }
    })
}
