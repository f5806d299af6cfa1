//! Exercises the C ABI from Rust through raw pointers, as a foreign caller would.

use std::ffi::{CStr, CString};
use std::ptr;

use sklyanin_core::ellhyp::SixJTable;
use sklyanin_core::metric::constant_c;
use sklyanin_core::theta::theta;
use sklyanin_core::{ModularContext, C64};
use sklyanin_ffi::*;

fn c(re: f64, im: f64) -> SkComplex {
    SkComplex { re, im }
}

fn new_context(tau_im: f64, eta: SkComplex) -> *mut SkContext {
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { sk_context_new(tau_im, eta, &mut ctx) }, SkStatus::Ok);
    assert!(!ctx.is_null());
    ctx
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sk_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn theta_matches_core() {
    let ctx = new_context(0.25, c(0.05, 0.0));
    let core = ModularContext::new(0.25, C64::new(0.05, 0.0)).unwrap();
    let mut out = c(0.0, 0.0);
    for x in [c(0.1, 0.0), c(0.3, 0.07), c(-0.41, 0.2)] {
        assert_eq!(unsafe { sk_theta(ctx, x, &mut out) }, SkStatus::Ok);
        let want = theta(x.into(), &core).unwrap();
        assert_eq!(C64::from(out), want);
    }
    let mut cc = c(0.0, 0.0);
    assert_eq!(unsafe { sk_constant_c(ctx, 3, &mut cc) }, SkStatus::Ok);
    assert_eq!(C64::from(cc), constant_c(3, &core).unwrap());
    let mut p = 0.0;
    assert_eq!(unsafe { sk_context_nome(ctx, &mut p) }, SkStatus::Ok);
    assert!((p - (-2.0 * std::f64::consts::PI * 0.25).exp()).abs() < 1e-15);
    unsafe { sk_context_free(ctx) };
}

#[test]
fn invalid_context_reports_error() {
    let mut ctx = ptr::null_mut();
    let st = unsafe { sk_context_new(-1.0, c(0.05, 0.0), &mut ctx) };
    assert_eq!(st, SkStatus::InvalidParameter);
    assert!(ctx.is_null());
    assert!(!last_error().is_empty());
    let st = unsafe { sk_context_new(0.25, c(0.05, 0.05), &mut ctx) };
    assert_ne!(st, SkStatus::Ok);
}

#[test]
fn null_pointers_are_rejected() {
    let mut out = c(0.0, 0.0);
    assert_eq!(unsafe { sk_theta(ptr::null(), c(0.1, 0.0), &mut out) }, SkStatus::NullPointer);
    assert!(last_error().contains("context"));
    let ctx = new_context(0.25, c(0.05, 0.0));
    assert_eq!(unsafe { sk_theta(ctx, c(0.1, 0.0), ptr::null_mut()) }, SkStatus::NullPointer);
    unsafe {
        sk_context_free(ctx);
        sk_context_free(ptr::null_mut());
        sk_sixj_free(ptr::null_mut());
        sk_string_free(ptr::null_mut());
    }
}

#[test]
fn eta_zero_brackets_fail_with_code() {
    let ctx = new_context(0.25, c(0.0, 0.0));
    let mut out = c(0.0, 0.0);
    assert_eq!(unsafe { sk_bracket(ctx, c(1.0, 0.0), &mut out) }, SkStatus::EtaZero);
    unsafe { sk_context_free(ctx) };
}

#[test]
fn weight_gamma_and_summation() {
    let ctx = new_context(0.25, c(0.05, 0.0));
    let mut m = c(0.0, 0.0);
    let u = c(0.21, 0.07);
    assert_eq!(unsafe { sk_weight(ctx, u, c(u.re, -u.im), 2, &mut m) }, SkStatus::Ok);
    assert!(m.re.is_finite() && m.im.is_finite());
    let mut g = c(0.0, 0.0);
    assert_eq!(unsafe { sk_gamma_k(ctx, c(0.31, 0.06), c(0.12, 0.03), 1, 3, &mut g) }, SkStatus::Ok);
    assert!(C64::from(g).norm() > 0.0);
    let mut ft = SkFtResult { lhs: c(0.0, 0.0), rhs: c(0.0, 0.0), residual: 1.0, condition: 0.0, termwise: 1.0 };
    let st = unsafe { sk_frenkel_turaev(ctx, c(0.3, 0.1), c(-0.4, 0.2), c(0.7, -0.1), c(0.2, 0.3), 3, &mut ft) };
    assert_eq!(st, SkStatus::Ok);
    assert!(ft.termwise < 1e-13, "termwise {}", ft.termwise);
    let mut eg = c(0.0, 0.0);
    let q = c(0.0, 0.0);
    assert_eq!(unsafe { sk_elliptic_gamma(c(0.3, 0.1), 0.2, q, &mut eg) }, SkStatus::InvalidParameter);
    assert_eq!(unsafe { sk_elliptic_gamma(c(0.3, 0.1), 0.2, c(0.5, 0.1), &mut eg) }, SkStatus::Ok);
    unsafe { sk_context_free(ctx) };
}

#[test]
fn sixj_handle_round_trip() {
    let ctx = new_context(0.25, c(0.05, 0.0));
    let mut t = ptr::null_mut();
    let (a, b, cc, d) = (c(0.31, 0.06), c(-0.17, 0.04), c(0.12, 0.03), c(-0.36, 0.05));
    assert_eq!(unsafe { sk_sixj_new(ctx, a, b, cc, d, 2, &mut t) }, SkStatus::Ok);
    let mut n = 0usize;
    assert_eq!(unsafe { sk_sixj_order(t, &mut n) }, SkStatus::Ok);
    assert_eq!(n, 2);
    let (mut cond, mut hold) = (0.0, 1.0);
    assert_eq!(unsafe { sk_sixj_diagnostics(t, &mut cond, &mut hold) }, SkStatus::Ok);
    assert!(cond >= 1.0 && hold < 1e-8);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { sk_sixj_to_json(t, &mut json) }, SkStatus::Ok);
    let table = SixJTable::from_json(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    unsafe { sk_string_free(json) };
    let mut r = c(0.0, 0.0);
    for k in 0..=2 {
        for l in 0..=2 {
            assert_eq!(unsafe { sk_sixj_get(t, k, l, &mut r) }, SkStatus::Ok);
            assert_eq!(C64::from(r), table.get(k, l));
        }
    }
    assert_eq!(unsafe { sk_sixj_get(t, 3, 0, &mut r) }, SkStatus::IndexOutOfRange);
    unsafe {
        sk_sixj_free(t);
        sk_context_free(ctx);
    }
}

#[test]
fn verify_report_through_abi() {
    let suites = CString::new("theta").unwrap();
    let kind = CString::new("real").unwrap();
    let mut json = ptr::null_mut();
    let mut ok = false;
    let st = unsafe { sk_verify_json(suites.as_ptr(), 0.25, 0.05, kind.as_ptr(), 3, 16, 16, 42, &mut json, &mut ok) };
    assert_eq!(st, SkStatus::Ok);
    assert!(ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { sk_string_free(json) };
    assert!(text.contains("\"theta\""));

    let bad = CString::new("nosuch").unwrap();
    let st = unsafe { sk_verify_json(bad.as_ptr(), 0.25, 0.05, kind.as_ptr(), 3, 16, 16, 42, &mut json, &mut ok) };
    assert_eq!(st, SkStatus::Config);
    let st = unsafe { sk_verify_json(suites.as_ptr(), 0.25, 0.2, kind.as_ptr(), 3, 16, 16, 42, &mut json, &mut ok) };
    assert_eq!(st, SkStatus::Config);
    assert!(last_error().contains("eta"));
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(sk_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
