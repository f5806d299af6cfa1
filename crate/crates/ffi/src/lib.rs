//! C ABI over `sklyanin-core`.
//!
//! Conventions:
//! - every fallible call returns an [`SkStatus`]; results go through out-pointers
//!   that are written only on success;
//! - the message of the most recent failure on the calling thread is available
//!   from [`sk_last_error`];
//! - objects are opaque handles created by `sk_*_new` and released by the
//!   matching `sk_*_free`; strings returned by the library are released with
//!   [`sk_string_free`];
//! - panics never cross the boundary; they surface as `SK_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;
use sklyanin_core::ellhyp::{elliptic_gamma, frenkel_turaev, sixj_solve, FTParams, SixJTable};
use sklyanin_core::metric::{constant_c, gamma_k, weight_m};
use sklyanin_core::theta::{bracket, theta};
use sklyanin_core::verify::{render, run, EtaKindArg, Format, Suite, SuiteConfig};
use sklyanin_core::{Error, ModularContext, C64};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidParameter = 3,
    NonConvergence = 4,
    EtaZero = 5,
    DegenerateNodes = 6,
    DegenerateParams = 7,
    DegenerateEta = 8,
    IndexOutOfRange = 9,
    OrderMismatch = 10,
    SingularExtraction = 11,
    PoleHit = 12,
    GridTooCoarse = 13,
    InvalidBasis = 14,
    IllConditioned = 15,
    Config = 16,
    Io = 17,
    Panic = 99,
}

impl From<&Error> for SkStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) => SkStatus::InvalidParameter,
            Error::NonConvergence { .. } => SkStatus::NonConvergence,
            Error::EtaZero => SkStatus::EtaZero,
            Error::DegenerateNodes { .. } => SkStatus::DegenerateNodes,
            Error::DegenerateParams(_) => SkStatus::DegenerateParams,
            Error::DegenerateEta(_) => SkStatus::DegenerateEta,
            Error::IndexOutOfRange { .. } => SkStatus::IndexOutOfRange,
            Error::OrderMismatch { .. } => SkStatus::OrderMismatch,
            Error::SingularExtraction => SkStatus::SingularExtraction,
            Error::PoleHit { .. } => SkStatus::PoleHit,
            Error::GridTooCoarse { .. } => SkStatus::GridTooCoarse,
            Error::InvalidBasis(_) => SkStatus::InvalidBasis,
            Error::IllConditioned { .. } => SkStatus::IllConditioned,
            Error::Config(_) => SkStatus::Config,
            Error::Io(_) => SkStatus::Io,
        }
    }
}

/// A complex number `re + i im`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkComplex {
    pub re: f64,
    pub im: f64,
}

impl From<SkComplex> for C64 {
    fn from(z: SkComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

impl From<C64> for SkComplex {
    fn from(z: C64) -> Self {
        SkComplex { re: z.re, im: z.im }
    }
}

/// Both sides of the balanced terminating summation and its residuals.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkFtResult {
    pub lhs: SkComplex,
    pub rhs: SkComplex,
    pub residual: f64,
    pub condition: f64,
    pub termwise: f64,
}

/// Modular parameters `tau = i tau_im` and `eta`, with the theta evaluator.
pub struct SkContext {
    inner: ModularContext,
}

/// A solved table of 6j-symbols.
pub struct SkSixJTable {
    inner: SixJTable,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Status(SkStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Status(SkStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(SkStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status and the thread's last error.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> SkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SkStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_last_error(&msg);
            s
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(&format!("panic: {msg}"));
            SkStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn context<'a>(ctx: *const SkContext) -> Result<&'a ModularContext, Fail> {
    ctx.as_ref().map(|c| &c.inner).ok_or_else(|| null("context"))
}

unsafe fn string_arg(s: *const c_char, what: &str) -> Result<String, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Fail::Status(SkStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the most recent failure on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version string (static; do not free).
#[no_mangle]
pub extern "C" fn sk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a context for `tau = i tau_im` and `eta` (real, purely imaginary or zero).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn sk_context_new(tau_im: f64, eta: SkComplex, out: *mut *mut SkContext) -> SkStatus {
    guard(|| {
        let inner = ModularContext::new(tau_im, eta.into())?;
        write(out, Box::into_raw(Box::new(SkContext { inner })), "out")
    })
}

/// Releases a context. Null is ignored.
///
/// # Safety
/// `ctx` must come from [`sk_context_new`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sk_context_free(ctx: *mut SkContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Nome `p = e^{2 pi i tau}` of the context.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_context_nome(ctx: *const SkContext, out: *mut f64) -> SkStatus {
    guard(|| write(out, context(ctx)?.p(), "out"))
}

/// Odd Jacobi theta function `theta_1(x | tau)`.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_theta(ctx: *const SkContext, x: SkComplex, out: *mut SkComplex) -> SkStatus {
    guard(|| {
        let v = theta(x.into(), context(ctx)?)?;
        write(out, v.into(), "out")
    })
}

/// Elliptic number `[x] = theta_1(2 eta x)`.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_bracket(ctx: *const SkContext, x: SkComplex, out: *mut SkComplex) -> SkStatus {
    guard(|| {
        let v = bracket(x.into(), context(ctx)?)?;
        write(out, v.into(), "out")
    })
}

/// Weight `M(u, v)` of the invariant metric on the order-`n` space.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_weight(
    ctx: *const SkContext,
    u: SkComplex,
    v: SkComplex,
    n: usize,
    out: *mut SkComplex,
) -> SkStatus {
    guard(|| {
        let m = weight_m(u.into(), v.into(), n, context(ctx)?)?;
        write(out, m.into(), "out")
    })
}

/// Normalization constant `C` of the reproducing kernel on the order-`n` space.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_constant_c(ctx: *const SkContext, n: usize, out: *mut SkComplex) -> SkStatus {
    guard(|| {
        let c = constant_c(n, context(ctx)?)?;
        write(out, c.into(), "out")
    })
}

/// Biorthogonality norm `Gamma_k(a1, a2)` on the order-`n` space.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_gamma_k(
    ctx: *const SkContext,
    a1: SkComplex,
    a2: SkComplex,
    k: usize,
    n: usize,
    out: *mut SkComplex,
) -> SkStatus {
    guard(|| {
        let g = gamma_k(a1.into(), a2.into(), k, n, context(ctx)?)?;
        write(out, g.into(), "out")
    })
}

/// Elliptic gamma function `Gamma(x; p, q)` with `0 < p < 1`, `0 < |q| < 1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_elliptic_gamma(x: SkComplex, p: f64, q: SkComplex, out: *mut SkComplex) -> SkStatus {
    guard(|| {
        let g = elliptic_gamma(x.into(), p, q.into())?;
        write(out, g.into(), "out")
    })
}

/// Balanced terminating summation for `a, b, c, d` and order `n`; the fifth
/// parameter is fixed by the balancing condition.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_frenkel_turaev(
    ctx: *const SkContext,
    a: SkComplex,
    b: SkComplex,
    c: SkComplex,
    d: SkComplex,
    n: usize,
    out: *mut SkFtResult,
) -> SkStatus {
    guard(|| {
        let r = frenkel_turaev(&FTParams::new(a.into(), b.into(), c.into(), d.into(), n), context(ctx)?)?;
        let v = SkFtResult {
            lhs: r.lhs.into(),
            rhs: r.rhs.into(),
            residual: r.residual,
            condition: r.condition,
            termwise: r.termwise,
        };
        write(out, v, "out")
    })
}

/// Solves the change of basis `e_k^{(a,b)} = sum_l R_kl e_l^{(c,d)}` on the order-`n` space.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_sixj_new(
    ctx: *const SkContext,
    a: SkComplex,
    b: SkComplex,
    c: SkComplex,
    d: SkComplex,
    n: usize,
    out: *mut *mut SkSixJTable,
) -> SkStatus {
    guard(|| {
        let inner = sixj_solve(a.into(), b.into(), c.into(), d.into(), n, context(ctx)?)?;
        write(out, Box::into_raw(Box::new(SkSixJTable { inner })), "out")
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `table` must come from [`sk_sixj_new`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sk_sixj_free(table: *mut SkSixJTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Order `n` of the table (entries are indexed `0..=n`).
///
/// # Safety
/// `table` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_sixj_order(table: *const SkSixJTable, out: *mut usize) -> SkStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        write(out, t.inner.n, "out")
    })
}

/// Entry `R_kl`.
///
/// # Safety
/// `table` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_sixj_get(table: *const SkSixJTable, k: usize, l: usize, out: *mut SkComplex) -> SkStatus {
    guard(|| {
        let t = &table.as_ref().ok_or_else(|| null("table"))?.inner;
        if k > t.n || l > t.n {
            return Err(Error::IndexOutOfRange { k: k.max(l), n: t.n }.into());
        }
        write(out, t.get(k, l).into(), "out")
    })
}

/// Condition number of the solve and worst holdout residual.
///
/// # Safety
/// `table`, `cond` and `holdout` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_sixj_diagnostics(
    table: *const SkSixJTable,
    cond: *mut f64,
    holdout: *mut f64,
) -> SkStatus {
    guard(|| {
        let t = &table.as_ref().ok_or_else(|| null("table"))?.inner;
        if holdout.is_null() {
            return Err(null("holdout"));
        }
        write(cond, t.cond, "cond")?;
        write(holdout, t.holdout_residual, "holdout")
    })
}

/// Table as JSON; release with [`sk_string_free`].
///
/// # Safety
/// `table` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sk_sixj_to_json(table: *const SkSixJTable, out: *mut *mut c_char) -> SkStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        write(out, owned_string(t.inner.to_json()), "out")
    })
}

/// Runs verification suites and returns the JSON report.
///
/// `suites` is a comma-separated list (`"all"` for every suite); `eta_kind` is
/// `"real"`, `"imaginary"` or `"zero"`. `all_passed` may be null.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn sk_verify_json(
    suites: *const c_char,
    tau_im: f64,
    eta: f64,
    eta_kind: *const c_char,
    n: usize,
    grid_m1: usize,
    grid_m2: usize,
    seed: u64,
    out: *mut *mut c_char,
    all_passed: *mut bool,
) -> SkStatus {
    guard(|| {
        let cfg = SuiteConfig {
            suites: Suite::parse_list(&string_arg(suites, "suites")?)?,
            tau_im,
            eta,
            eta_kind: string_arg(eta_kind, "eta_kind")?.parse::<EtaKindArg>()?,
            n,
            grid: (grid_m1, grid_m2),
            seed,
            ..SuiteConfig::default()
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let report = run(&cfg)?;
        if !all_passed.is_null() {
            all_passed.write(report.all_passed());
        }
        write(out, owned_string(render(&report, Format::Json)), "out")
    })
}
