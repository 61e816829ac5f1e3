//! C ABI over `hesslab`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns an
//! [`HlStatus`]; on failure `hl_last_error` describes the most recent error
//! on the calling thread. Strings returned through `char **` out-parameters
//! are released with [`hl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hesslab::census::count_type;
use hesslab::closedform::poincare_mmax_for_type;
use hesslab::hesscore::{HessenbergSpec, HessenbergVector, JordanType};
use hesslab::patches::patch_determinant;
use hesslab::paving::poincare_tymoczko;
use hesslab::qpoly::BettiPolynomial;
use hesslab::symgrp::{ls_singular_maximal, Permutation};
use hesslab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    VerificationFailure = 1,
    InvalidInput = 2,
    InadmissiblePrime = 3,
    NullPointer = 4,
    Internal = 5,
}

/// Opaque Jordan type.
pub struct HlJordanType(JordanType);

/// Opaque Hessenberg vector.
pub struct HlHessenberg(HessenbergVector);

/// Opaque Poincaré polynomial in `t = q^2`.
pub struct HlPolynomial(BettiPolynomial);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HlStatus {
    match e {
        Error::InadmissiblePrime { .. } => HlStatus::InadmissiblePrime,
        Error::Inconsistent(_) => HlStatus::VerificationFailure,
        _ => HlStatus::InvalidInput,
    }
}

/// Runs `f`, mapping errors and panics to a status and recording the message.
fn guard(f: impl FnOnce() -> Result<(), (HlStatus, String)>) -> HlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HlStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (HlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (HlStatus, String) {
    (HlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (HlStatus, String)> {
    if s.is_null() {
        return Err(null_err(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (HlStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), (HlStatus, String)> {
    if out.is_null() {
        return Err(null_err("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (HlStatus, String)> {
    if out.is_null() {
        return Err(null_err("output pointer"));
    }
    let c = CString::new(s).map_err(|_| (HlStatus::Internal, "string contains NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (HlStatus, String)> {
    p.as_ref().ok_or_else(|| null_err(what))
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn hl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a Jordan type such as `[[2,1],[1]] @ [0,5]`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_jordan_type_parse(
    text: *const c_char,
    out: *mut *mut HlJordanType,
) -> HlStatus {
    guard(|| {
        let t: JordanType = read_str(text, "text")?.parse().map_err(lib_err)?;
        write_out(out, HlJordanType(t))
    })
}

/// # Safety
/// `t` must come from `hl_jordan_type_parse`, or be null.
#[no_mangle]
pub unsafe extern "C" fn hl_jordan_type_free(t: *mut HlJordanType) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hl_jordan_type_n(t: *const HlJordanType) -> usize {
    t.as_ref().map_or(0, |t| t.0.n())
}

/// Parses `2,3,3` or one of `max`, `sing`, `full` resolved at size `n`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_hessenberg_parse(
    text: *const c_char,
    n: usize,
    out: *mut *mut HlHessenberg,
) -> HlStatus {
    guard(|| {
        let spec: HessenbergSpec = read_str(text, "text")?.parse().map_err(lib_err)?;
        let m = spec.resolve(n).map_err(lib_err)?;
        write_out(out, HlHessenberg(m))
    })
}

/// # Safety
/// `m` must come from `hl_hessenberg_parse`, or be null.
#[no_mangle]
pub unsafe extern "C" fn hl_hessenberg_free(m: *mut HlHessenberg) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Poincaré polynomial from the paving dimension count.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_poincare_tymoczko(
    t: *const HlJordanType,
    m: *const HlHessenberg,
    out: *mut *mut HlPolynomial,
) -> HlStatus {
    guard(|| {
        let t = handle(t, "jordan type")?;
        let m = handle(m, "hessenberg vector")?;
        if t.0.n() != m.0.n() {
            return Err(lib_err(Error::SizeMismatch {
                expected: t.0.n(),
                found: m.0.n(),
            }));
        }
        write_out(out, HlPolynomial(poincare_tymoczko(&t.0, &m.0)))
    })
}

/// Closed-form Poincaré polynomial of `B(x, H(m_max))`.
///
/// # Safety
/// `t` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_poincare_closed(
    t: *const HlJordanType,
    out: *mut *mut HlPolynomial,
) -> HlStatus {
    guard(|| {
        let t = handle(t, "jordan type")?;
        write_out(
            out,
            HlPolynomial(poincare_mmax_for_type(&t.0).map_err(lib_err)?),
        )
    })
}

/// # Safety
/// `p` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn hl_polynomial_free(p: *mut HlPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of stored coefficients (degree + 1; 0 for the zero polynomial).
///
/// # Safety
/// `p` must be live.
#[no_mangle]
pub unsafe extern "C" fn hl_polynomial_len(p: *const HlPolynomial) -> usize {
    p.as_ref().map_or(0, |p| p.0.coeffs().len())
}

/// Coefficient of `t^k` (0 past the degree).
///
/// # Safety
/// `p` must be live.
#[no_mangle]
pub unsafe extern "C" fn hl_polynomial_coeff(p: *const HlPolynomial, k: usize) -> i64 {
    p.as_ref().map_or(0, |p| p.0.coeff(k))
}

/// Renders the polynomial in `t`, e.g. `1+2t+t²`.
///
/// # Safety
/// `p` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_polynomial_to_string(
    p: *const HlPolynomial,
    out: *mut *mut c_char,
) -> HlStatus {
    guard(|| write_string(out, handle(p, "polynomial")?.0.to_string()))
}

/// Counts `F_p`-points; the report is written as JSON. Inadmissible primes
/// fail with `InadmissiblePrime` unless `force` is nonzero.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_count_points(
    t: *const HlJordanType,
    m: *const HlHessenberg,
    p: u64,
    force: i32,
    out: *mut *mut c_char,
) -> HlStatus {
    guard(|| {
        let t = handle(t, "jordan type")?;
        let m = handle(m, "hessenberg vector")?;
        let report = count_type(&t.0, &m.0, p).map_err(lib_err)?;
        if !report.admissible && force == 0 {
            return Err(lib_err(Error::InadmissiblePrime {
                p,
                reason: "two distinct entries of x are congruent mod p".into(),
            }));
        }
        let json =
            serde_json::to_string(&report).map_err(|e| (HlStatus::Internal, e.to_string()))?;
        write_string(out, json)
    })
}

/// `det(A_g)` for matrices given as JSON rows (integers or `"a/b"`
/// strings), rendered like `z21*z32 - z31`.
///
/// # Safety
/// Inputs must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_patch_determinant(
    x_json: *const c_char,
    g_json: *const c_char,
    out: *mut *mut c_char,
) -> HlStatus {
    guard(|| {
        let x = hesslab::cli::parse_matrix(read_str(x_json, "x")?, None).map_err(lib_err)?;
        let g = hesslab::cli::parse_matrix(read_str(g_json, "g")?, Some(x.n())).map_err(lib_err)?;
        let det = patch_determinant(&x, &g).map_err(lib_err)?;
        write_string(out, det.to_string())
    })
}

/// Bruhat-maximal components of the singular locus of `X_w`, as a JSON list
/// of one-line permutations.
///
/// # Safety
/// `w` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_schubert_singular(w: *const c_char, out: *mut *mut c_char) -> HlStatus {
    guard(|| {
        let w: Permutation = read_str(w, "w")?.parse().map_err(lib_err)?;
        let list: Vec<String> = ls_singular_maximal(&w)
            .iter()
            .map(|v| v.to_string())
            .collect();
        let json = serde_json::to_string(&list).map_err(|e| (HlStatus::Internal, e.to_string()))?;
        write_string(out, json)
    })
}
