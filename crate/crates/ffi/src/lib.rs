//! C interface to `horner-mcts`.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every fallible call returns an [`HmStatus`]; on failure a message for the
//! calling thread is available from [`hm_last_error`]. Strings handed out by
//! the library are NUL-terminated and must be released with
//! [`hm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use horner_mcts::benchgen::{self, RandomExprParams};
use horner_mcts::experiment;
use horner_mcts::horner::{self, Direction, Scheme};
use horner_mcts::mcts::{self, Criterion, Schedule, SearchParams, SearchReport};
use horner_mcts::{Error, Expression, OpCount, ParseError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidScheme = 4,
    InvalidParameter = 5,
    TooManyVariables = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmDirection {
    Forward = 0,
    Backward = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmCriterion {
    Uct = 0,
    SaUct = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmSchedule {
    Linear = 0,
    /// Halves every `half_life` iterations.
    Exponential = 1,
    Constant = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HmOpCount {
    pub mul: u64,
    pub add: u64,
}

impl From<OpCount> for HmOpCount {
    fn from(o: OpCount) -> Self {
        Self {
            mul: o.mul,
            add: o.add,
        }
    }
}

/// Search settings; start from [`hm_search_params_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HmSearchParams {
    pub cp: f64,
    pub n_updates: u64,
    pub repeats: u64,
    pub criterion: HmCriterion,
    pub schedule: HmSchedule,
    /// Only read for [`HmSchedule::Exponential`].
    pub half_life: f64,
    pub direction: HmDirection,
    pub seed: u64,
}

/// A parsed polynomial.
pub struct HmExpr(Expression);

/// The outcome of a search.
pub struct HmSearchResult {
    report: SearchReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(HmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) => HmStatus::ParseError,
            Error::UnknownVariable(_) | Error::DuplicateVariable(_) | Error::InvalidScheme(_) => {
                HmStatus::InvalidScheme
            }
            Error::TooManyVariables { .. } => HmStatus::TooManyVariables,
            Error::EmptyExpression
            | Error::InvalidParameter(_)
            | Error::CapacityExceeded { .. }
            | Error::MissingAssignment(_) => HmStatus::InvalidParameter,
            Error::Io(_) | Error::Csv(_) => HmStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Error::from(e).into()
    }
}

fn null(what: &str) -> Failure {
    Failure(HmStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            HmStatus::Internal
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(HmStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn expr<'a>(p: *const HmExpr) -> Result<&'a Expression, Failure> {
    p.as_ref().map(|e| &e.0).ok_or_else(|| null("expr"))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let s = CString::new(s).map_err(|e| Failure(HmStatus::Internal, e.to_string()))?;
    put(out, s.into_raw(), "out")
}

fn boxed(e: Expression) -> *mut HmExpr {
    Box::into_raw(Box::new(HmExpr(e)))
}

/// The message of the calling thread's most recent failure, or null. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses expression text such as `"3*x^2*y - sin(x) + 7"`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_expr_parse(text: *const c_char, out: *mut *mut HmExpr) -> HmStatus {
    guard(|| {
        let e = Expression::parse(c_str(text, "text")?)?;
        put(out, boxed(e), "out")
    })
}

/// The resultant of generic polynomials of degrees `m` and `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_expr_resultant(m: u32, n: u32, out: *mut *mut HmExpr) -> HmStatus {
    guard(|| put(out, boxed(benchgen::resultant_expr(m, n)?), "out"))
}

/// A seeded random polynomial over `x1..x{n_vars}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_expr_random(
    n_vars: u32,
    n_terms: u32,
    max_exponent: u32,
    coeff_range: u32,
    seed: u64,
    out: *mut *mut HmExpr,
) -> HmStatus {
    guard(|| {
        let e = benchgen::random_expr(&RandomExprParams {
            n_vars,
            n_terms,
            max_exponent,
            coeff_range,
            seed,
        })?;
        put(out, boxed(e), "out")
    })
}

/// Releases an expression. Null is ignored.
///
/// # Safety
/// `e` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hm_expr_free(e: *mut HmExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Canonical text of an expression; free with [`hm_string_free`].
///
/// # Safety
/// `e` must be a live expression and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_expr_to_string(e: *const HmExpr, out: *mut *mut c_char) -> HmStatus {
    guard(|| put_string(out, expr(e)?.to_string()))
}

/// Number of distinct variables.
///
/// # Safety
/// `e` must be a live expression and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_expr_num_variables(e: *const HmExpr, out: *mut usize) -> HmStatus {
    guard(|| put(out, expr(e)?.variables().len(), "out"))
}

/// Operation count of the expanded form.
///
/// # Safety
/// `e` must be a live expression and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_expr_naive_count(e: *const HmExpr, out: *mut HmOpCount) -> HmStatus {
    guard(|| put(out, expr(e)?.naive_op_count().into(), "out"))
}

/// Operation count after Horner and CSE for `scheme` (`"y,x;backward"`
/// style), or for the occurrence-order scheme when `scheme` is null.
///
/// # Safety
/// `e` must be a live expression, `scheme` null or NUL-terminated, and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn hm_simplify(
    e: *const HmExpr,
    scheme: *const c_char,
    out: *mut HmOpCount,
) -> HmStatus {
    guard(|| {
        let e = expr(e)?;
        let s = if scheme.is_null() {
            horner::occurrence_order(e)
        } else {
            Scheme::parse(c_str(scheme, "scheme")?, e)?
        };
        put(out, horner_mcts::simplify(e, &s)?.ops.into(), "out")
    })
}

/// Default search settings.
#[no_mangle]
pub extern "C" fn hm_search_params_default() -> HmSearchParams {
    let d = SearchParams::default();
    HmSearchParams {
        cp: d.cp,
        n_updates: d.n_updates,
        repeats: d.repeats,
        criterion: match d.criterion {
            Criterion::Uct => HmCriterion::Uct,
            Criterion::SaUct => HmCriterion::SaUct,
        },
        schedule: HmSchedule::Linear,
        half_life: 0.0,
        direction: HmDirection::Forward,
        seed: d.seed,
    }
}

fn direction(d: HmDirection) -> Direction {
    match d {
        HmDirection::Forward => Direction::Forward,
        HmDirection::Backward => Direction::Backward,
    }
}

/// Runs `repeats` searches and keeps the best result.
///
/// # Safety
/// `e` must be a live expression, `params` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_search(
    e: *const HmExpr,
    params: *const HmSearchParams,
    out: *mut *mut HmSearchResult,
) -> HmStatus {
    guard(|| {
        let e = expr(e)?;
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let params = SearchParams {
            cp: p.cp,
            n_updates: p.n_updates,
            repeats: p.repeats,
            criterion: match p.criterion {
                HmCriterion::Uct => Criterion::Uct,
                HmCriterion::SaUct => Criterion::SaUct,
            },
            schedule: match p.schedule {
                HmSchedule::Linear => Schedule::Linear,
                HmSchedule::Exponential => Schedule::Exponential {
                    half_life: p.half_life,
                },
                HmSchedule::Constant => Schedule::Constant,
            },
            direction: direction(p.direction),
            seed: p.seed,
        };
        let r = mcts::repeat_search(e, &params)?;
        let report = SearchReport::new(e, &params, &r);
        put(out, Box::into_raw(Box::new(HmSearchResult { report })), "out")
    })
}

/// Releases a search result. Null is ignored.
///
/// # Safety
/// `r` must come from [`hm_search`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hm_search_result_free(r: *mut HmSearchResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Best operation count found.
///
/// # Safety
/// `r` must be a live result and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_search_result_ops(
    r: *const HmSearchResult,
    out: *mut HmOpCount,
) -> HmStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("result"))?.report;
        put(
            out,
            HmOpCount {
                mul: r.best_mul,
                add: r.best_add,
            },
            "out",
        )
    })
}

/// The best scheme as `"a,b,c;forward"`; free with [`hm_string_free`].
///
/// # Safety
/// `r` must be a live result and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_search_result_scheme(
    r: *const HmSearchResult,
    out: *mut *mut c_char,
) -> HmStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("result"))?.report;
        put_string(out, r.scheme.clone())
    })
}

/// The full result as a JSON object; free with [`hm_string_free`].
///
/// # Safety
/// `r` must be a live result and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_search_result_json(
    r: *const HmSearchResult,
    out: *mut *mut c_char,
) -> HmStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("result"))?.report;
        let json =
            serde_json::to_string(r).map_err(|e| Failure(HmStatus::Internal, e.to_string()))?;
        put_string(out, json)
    })
}

/// Scores every variable ordering (at most 8 variables). `scheme_out` may be
/// null; otherwise it receives the first optimal scheme.
///
/// # Safety
/// `e` must be a live expression, `out` writable and `scheme_out` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn hm_bruteforce(
    e: *const HmExpr,
    dir: HmDirection,
    out: *mut HmOpCount,
    scheme_out: *mut *mut c_char,
) -> HmStatus {
    guard(|| {
        let e = expr(e)?;
        let r = experiment::bruteforce(e, direction(dir))?;
        put(out, r.best.into(), "out")?;
        if !scheme_out.is_null() {
            put_string(scheme_out, r.scheme.to_text(e.atoms()))?;
        }
        Ok(())
    })
}
