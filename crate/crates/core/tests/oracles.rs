//! Frozen high-precision reference values (tools/oracle.py) against the library.

mod oracle_values;

use oracle_values::*;
use sklyanin_core::ellhyp::elliptic_gamma;
use sklyanin_core::metric::{constant_c, gamma_k, weight_m, weight_m_nonneg};
use sklyanin_core::space::BasisParams;
use sklyanin_core::theta::{theta, theta_prime, theta_prime_zero_closed, theta_product};
use sklyanin_core::{ModularContext, C64};

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn ctx(tau_im: f64, eta: C64) -> ModularContext {
    ModularContext::new(tau_im, eta).unwrap()
}

#[test]
fn theta_values() {
    for &(tau_im, x, want) in &THETA {
        let c = ctx(tau_im, C64::new(0.05, 0.0));
        assert!(rel(theta(x, &c).unwrap(), want) < 1e-14, "theta({x}) at tau = {tau_im}i");
        assert!(rel(theta_product(x, &c).unwrap(), want) < 1e-13, "theta_product({x}) at tau = {tau_im}i");
    }
}

#[test]
fn theta_prime_zero_values() {
    for &(tau_im, want) in &THETA_PRIME_ZERO {
        let c = ctx(tau_im, C64::new(0.05, 0.0));
        assert!((theta_prime_zero_closed(&c) - want).abs() / want < 1e-14);
        let d = theta_prime(C64::new(0.0, 0.0), &c).unwrap();
        assert!(rel(d, C64::new(want, 0.0)) < 1e-13);
    }
}

#[test]
fn basis_values() {
    let (a, b) = (C64::new(0.13, 0.02), C64::new(-0.21, 0.05));
    let x = C64::new(0.31, 0.07);
    for &(tau_im, eta, n, k, want) in &BASIS {
        let bp = BasisParams::new(n, a, b, ctx(tau_im, eta));
        assert!(rel(bp.e(k, x), want) < 1e-13, "e_{k} for N = {n}, tau = {tau_im}i");
    }
}

#[test]
fn weight_values() {
    for &(tau_im, eta, n, u, want) in &WEIGHT {
        let c = ctx(tau_im, eta);
        assert!(rel(weight_m(u, u.conj(), n, &c).unwrap(), want) < 1e-12, "M at N = {n}, tau = {tau_im}i");
        assert!((weight_m_nonneg(u, n, &c) - want.re).abs() / want.re < 1e-10);
    }
}

#[test]
fn constant_values() {
    for &(tau_im, eta, n, want) in &CONST_C {
        assert!(rel(constant_c(n, &ctx(tau_im, eta)).unwrap(), want) < 1e-13, "C at N = {n}, tau = {tau_im}i");
    }
}

#[test]
fn gamma_k_values() {
    let (a1, a2) = (C64::new(0.31, 0.06), C64::new(0.12, 0.03));
    for &(tau_im, eta, n, k, want) in &GAMMA_K {
        let got = gamma_k(a1, a2, k, n, &ctx(tau_im, eta)).unwrap();
        assert!(rel(got, want) < 1e-12, "Gamma_{k} at N = {n}, tau = {tau_im}i: {got} vs {want}");
    }
}

#[test]
fn elliptic_gamma_values() {
    for &(p, q, x, want) in &ELL_GAMMA {
        assert!(rel(elliptic_gamma(x, p, q).unwrap(), want) < 1e-13, "Gamma({x}; {p}, {q})");
    }
}
