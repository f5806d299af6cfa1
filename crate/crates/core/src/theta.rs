//! Jacobi's odd theta function and the elliptic objects built from it.
//!
//! Everything here is parametrised by a [`ModularContext`] that fixes the
//! modulus `tau` (purely imaginary) and the deformation parameter `eta`
//! (real, purely imaginary or zero), together with the derived nomes
//! `p = exp(2 pi i tau)` and `q = exp(4 pi i eta)`.
//!
//! The series evaluator first reduces the argument into the strip
//! `|Im x| <= Im(tau)/2`, `|Re x| <= 1/2` using the quasi-periodicity
//! relations, so the truncated sine series is always in its fast regime.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

pub const DEFAULT_TOL: f64 = 1e-14;
pub const DEFAULT_MAX_TERMS: usize = 200;

/// Which line `eta` lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaKind {
    Real,
    Imaginary,
    Zero,
}

impl EtaKind {
    /// Classify `eta`; `None` if it is neither real nor purely imaginary.
    pub fn classify(eta: C64) -> Option<EtaKind> {
        match (eta.re == 0.0, eta.im == 0.0) {
            (true, true) => Some(EtaKind::Zero),
            (_, true) => Some(EtaKind::Real),
            (true, _) => Some(EtaKind::Imaginary),
            _ => None,
        }
    }
}

/// Ambient parameters of every formula in the crate.
///
/// `p` and `q` are always recomputed from `tau` and `eta`; they cannot be set
/// independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularContext {
    tau_im: f64,
    eta: C64,
    eta_kind: EtaKind,
    p: f64,
    q: C64,
    tol: f64,
    max_terms: usize,
    /// `(p;p)_inf`, cached since nearly every closed form needs a power of it.
    pp: f64,
}

impl ModularContext {
    /// Build a context with `tau = i * tau_im`.
    pub fn new(tau_im: f64, eta: C64) -> Result<Self> {
        Self::with_tolerance(tau_im, eta, DEFAULT_TOL, DEFAULT_MAX_TERMS)
    }

    pub fn with_tolerance(tau_im: f64, eta: C64, tol: f64, max_terms: usize) -> Result<Self> {
        if !(tau_im.is_finite() && tau_im > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Im(tau) must be positive and finite, got {tau_im}"
            )));
        }
        if !(eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::InvalidParameter("eta must be finite".into()));
        }
        let eta_kind = EtaKind::classify(eta).ok_or_else(|| {
            Error::InvalidParameter(format!("eta must be real or purely imaginary, got {eta}"))
        })?;
        if !(tol > 0.0 && tol < 1.0) || max_terms == 0 {
            return Err(Error::InvalidParameter("tolerance must lie in (0,1)".into()));
        }
        let p = (-2.0 * PI * tau_im).exp();
        let q = (4.0 * PI * I * eta).exp();
        let pp = pochhammer_inf(&[C64::new(p, 0.0)], p).re;
        Ok(ModularContext { tau_im, eta, eta_kind, p, q, tol, max_terms, pp })
    }

    /// Same modulus, different `eta`.
    pub fn with_eta(&self, eta: C64) -> Result<Self> {
        Self::with_tolerance(self.tau_im, eta, self.tol, self.max_terms)
    }

    pub fn tau(&self) -> C64 {
        C64::new(0.0, self.tau_im)
    }

    pub fn tau_im(&self) -> f64 {
        self.tau_im
    }

    pub fn eta(&self) -> C64 {
        self.eta
    }

    pub fn eta_kind(&self) -> EtaKind {
        self.eta_kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// `(p;p)_inf`.
    pub fn pp(&self) -> f64 {
        self.pp
    }

    /// `p^s` for real `s`.
    pub fn p_pow(&self, s: f64) -> f64 {
        (-2.0 * PI * self.tau_im * s).exp()
    }

    /// Theta value that never errors; non-convergence yields NaN, which then
    /// fails every residual comparison downstream.
    pub fn th(&self, x: C64) -> C64 {
        theta(x, self).unwrap_or(C64::new(f64::NAN, f64::NAN))
    }

    /// `theta(x_1) * ... * theta(x_n)`.
    pub fn th_prod<I2: IntoIterator<Item = C64>>(&self, xs: I2) -> C64 {
        xs.into_iter().map(|x| self.th(x)).product()
    }

    /// `theta(a + b) theta(a - b)`.
    pub fn th_pm(&self, a: C64, b: C64) -> C64 {
        self.th(a + b) * self.th(a - b)
    }

    /// `[x] = theta(2 eta x)` without the eta = 0 guard.
    pub(crate) fn br(&self, x: C64) -> C64 {
        self.th(2.0 * self.eta * x)
    }

    /// `[x]_k` without the eta = 0 guard.
    pub(crate) fn br_fact(&self, x: C64, k: usize) -> C64 {
        (0..k).map(|j| self.br(x + j as f64)).product()
    }

    /// Distance from `z` to the lattice `Z + tau Z`.
    pub fn lattice_distance(&self, z: C64) -> f64 {
        let n = (z.im / self.tau_im).round();
        let w = z - n * self.tau();
        let m = w.re.round();
        (w - m).norm()
    }
}

/// The eta ranges on which the invariant metric is a genuine scalar product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RangeKind {
    /// real, `|eta| < 1/2(N+1)`
    RN,
    /// imaginary, `|eta| < Im(tau)/2(N+1)`
    IN,
    /// real, `|eta| < 1/2N`
    RNminus1,
    /// imaginary, `|eta| < Im(tau)/2N`
    INminus1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamRange {
    pub kind: RangeKind,
    pub n: usize,
}

impl ParamRange {
    pub fn new(kind: RangeKind, n: usize) -> Self {
        ParamRange { kind, n }
    }

    /// Open bound on `|eta|`.
    pub fn bound(&self, tau_im: f64) -> f64 {
        let denom = match self.kind {
            RangeKind::RN | RangeKind::IN => 2.0 * (self.n as f64 + 1.0),
            RangeKind::RNminus1 | RangeKind::INminus1 => 2.0 * self.n as f64,
        };
        let scale = match self.kind {
            RangeKind::RN | RangeKind::RNminus1 => 1.0,
            RangeKind::IN | RangeKind::INminus1 => tau_im,
        };
        scale / denom
    }

    pub fn contains(&self, eta: C64, tau_im: f64) -> bool {
        let on_line = match self.kind {
            RangeKind::RN | RangeKind::RNminus1 => eta.im == 0.0,
            RangeKind::IN | RangeKind::INminus1 => eta.re == 0.0,
        };
        on_line && eta.norm() < self.bound(tau_im)
    }
}

/// `eta` in `R_N` or `I_N`.
pub fn in_metric_range(eta: C64, n: usize, tau_im: f64) -> bool {
    ParamRange::new(RangeKind::RN, n).contains(eta, tau_im)
        || ParamRange::new(RangeKind::IN, n).contains(eta, tau_im)
}

/// Split `x = x0 + m + n tau` with `|Re x0| <= 1/2`, `|Im x0| <= Im(tau)/2`.
fn reduce(x: C64, ctx: &ModularContext) -> (C64, i64, i64) {
    let t = ctx.tau_im;
    let n = (x.im / t).round();
    let x1 = x - C64::new(0.0, n * t);
    let m = x1.re.round();
    (x1 - m, m as i64, n as i64)
}

/// Prefactor with `theta(x0 + m + n tau) = pref * theta(x0)`.
fn reduction_prefactor(x0: C64, m: i64, n: i64, ctx: &ModularContext) -> C64 {
    let nf = n as f64;
    let sign = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let log_pref = -PI * I * (2.0 * nf * x0 + nf * nf * ctx.tau());
    sign * log_pref.exp()
}

/// Sum the sine series (`deriv = false`) or its termwise derivative.
fn reduced_series(x0: C64, deriv: bool, ctx: &ModularContext) -> Result<C64> {
    let t = ctx.tau_im;
    let mut sum = C64::new(0.0, 0.0);
    let mut max_bound = 0.0_f64;
    for j in 0..ctx.max_terms {
        let jf = j as f64;
        let freq = (2.0 * jf + 1.0) * PI;
        let amp = (-PI * t * (jf + 0.5) * (jf + 0.5)).exp();
        let sign = if j % 2 == 0 { 2.0 } else { -2.0 };
        let term = if deriv {
            sign * amp * freq * (freq * x0).cos()
        } else {
            sign * amp * (freq * x0).sin()
        };
        sum += term;
        // |sin| and |cos| are bounded by cosh of the imaginary part; the term
        // itself may vanish by accident and is useless as a stopping signal
        let bound = 2.0 * amp * (freq * x0.im).cosh() * if deriv { freq } else { 1.0 };
        max_bound = max_bound.max(bound);
        let negligible = bound <= 1e-17 * max_bound;
        let converged = bound <= ctx.tol * sum.norm();
        if j > 0 && (negligible || converged) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { max_terms: ctx.max_terms })
}

/// `theta_1(x | tau)` by the sine series after quasi-periodic reduction.
pub fn theta(x: C64, ctx: &ModularContext) -> Result<C64> {
    let (x0, m, n) = reduce(x, ctx);
    let s = reduced_series(x0, false, ctx)?;
    Ok(reduction_prefactor(x0, m, n, ctx) * s)
}

/// `theta'(x)`, termwise-differentiated series with the same reduction.
pub fn theta_prime(x: C64, ctx: &ModularContext) -> Result<C64> {
    let (x0, m, n) = reduce(x, ctx);
    let s = reduced_series(x0, false, ctx)?;
    let ds = reduced_series(x0, true, ctx)?;
    let pref = reduction_prefactor(x0, m, n, ctx);
    Ok(pref * (ds - 2.0 * PI * I * (n as f64) * s))
}

/// Triple-product form `i p^{1/8} e^{-pi i x} (p, e^{2 pi i x}, p e^{-2 pi i x}; p)_inf`.
///
/// Deliberately does no argument reduction; it serves as an independent
/// cross-check of [`theta`].
pub fn theta_product(x: C64, ctx: &ModularContext) -> Result<C64> {
    let p = ctx.p;
    let z = (2.0 * PI * I * x).exp();
    let prod = pochhammer_checked(&[C64::new(p, 0.0), z, p / z], p, ctx.max_terms * 50)?;
    Ok(I * p.powf(0.125) * (-PI * I * x).exp() * prod)
}

/// `(a_1, ..., a_n; p)_inf`, truncated once every factor is within machine
/// precision of one.
pub fn pochhammer_inf(a: &[C64], p: f64) -> C64 {
    pochhammer_checked(a, p, 100_000).unwrap_or(C64::new(f64::NAN, f64::NAN))
}

fn pochhammer_checked(a: &[C64], p: f64, max_factors: usize) -> Result<C64> {
    let mut prod = C64::new(1.0, 0.0);
    let mut pj = 1.0;
    for _ in 0..max_factors {
        let mut largest = 0.0_f64;
        for &ai in a {
            let f = ai * pj;
            largest = largest.max(f.norm());
            prod *= C64::new(1.0, 0.0) - f;
        }
        if largest <= f64::EPSILON * 0.25 {
            return Ok(prod);
        }
        pj *= p;
    }
    Err(Error::NonConvergence { max_terms: max_factors })
}

/// `[x] = theta(2 eta x)`.
pub fn bracket(x: C64, ctx: &ModularContext) -> Result<C64> {
    if ctx.eta_kind == EtaKind::Zero {
        return Err(Error::EtaZero);
    }
    theta(2.0 * ctx.eta * x, ctx)
}

/// `[x_1, ..., x_n]_k = prod_i [x_i][x_i + 1]...[x_i + k - 1]`.
pub fn elliptic_factorial(xs: &[C64], k: usize, ctx: &ModularContext) -> Result<C64> {
    if ctx.eta_kind == EtaKind::Zero {
        return Err(Error::EtaZero);
    }
    let mut prod = C64::new(1.0, 0.0);
    for &x in xs {
        for j in 0..k {
            prod *= bracket(x + j as f64, ctx)?;
        }
    }
    Ok(prod)
}

/// `2 pi p^{1/8} (p;p)_inf^3`.
pub fn theta_prime_zero_closed(ctx: &ModularContext) -> f64 {
    2.0 * PI * ctx.p_pow(0.125) * ctx.pp.powi(3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ModularContext {
        ModularContext::new(0.25, C64::new(0.05, 0.0)).unwrap()
    }

    #[test]
    fn vanishes_at_origin() {
        assert_eq!(theta(C64::new(0.0, 0.0), &ctx()).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(theta_product(C64::new(0.0, 0.0), &ctx()).unwrap().norm(), 0.0);
    }

    #[test]
    fn odd_parity() {
        let c = ctx();
        let x = C64::new(0.31, 0.07);
        let s = theta(x, &c).unwrap() + theta(-x, &c).unwrap();
        assert!(s.norm() < 1e-15);
    }

    #[test]
    fn product_agrees_at_point() {
        let c = ctx();
        let x = C64::new(0.17, 0.0);
        let a = theta(x, &c).unwrap();
        let b = theta_product(x, &c).unwrap();
        assert!((a - b).norm() <= 1e-12 * a.norm());
    }

    #[test]
    fn vanishing_term_does_not_truncate() {
        // sin(3 pi x) = 0 at x = 1/3 kills the second term of the series
        let c = ctx();
        for x in [C64::new(1.0 / 3.0, 0.0), C64::new(1.0 / 3.0, 0.03), C64::new(-1.0 / 3.0, 0.0)] {
            let a = theta(x, &c).unwrap();
            let b = theta_product(x, &c).unwrap();
            assert!((a - b).norm() < 1e-14, "{x}: {a} vs {b}");
        }
    }

    #[test]
    fn pochhammer_trivial_cases() {
        assert_eq!(pochhammer_inf(&[C64::new(0.0, 0.0)], 0.3), C64::new(1.0, 0.0));
        assert_eq!(pochhammer_inf(&[C64::new(1.0, 0.0)], 0.3), C64::new(0.0, 0.0));
    }

    #[test]
    fn pochhammer_matches_log_accumulation() {
        // independent oracle: sum of logs of the factors
        let mut log_sum = 0.0_f64;
        let mut pj = 1.0_f64;
        for _ in 0..200 {
            log_sum += (1.0 - 0.5 * pj).ln();
            pj *= 0.2;
        }
        let v = pochhammer_inf(&[C64::new(0.5, 0.0)], 0.2);
        assert!((v.re - log_sum.exp()).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn theta_prime_at_zero_closed_form() {
        for tau_im in [-(0.05f64.ln()) / (2.0 * PI), -(0.2f64.ln()) / (2.0 * PI)] {
            let c = ModularContext::new(tau_im, C64::new(0.05, 0.0)).unwrap();
            let d = theta_prime(C64::new(0.0, 0.0), &c).unwrap();
            let closed = theta_prime_zero_closed(&c);
            assert!((d - closed).norm() <= 1e-12 * closed);
        }
    }

    #[test]
    fn theta_prime_matches_finite_difference() {
        let c = ctx();
        let x = C64::new(0.13, 0.0);
        let h = 1e-5;
        let fd = (theta(x + h, &c).unwrap() - theta(x - h, &c).unwrap()) / (2.0 * h);
        let d = theta_prime(x, &c).unwrap();
        assert!((fd - d).norm() <= 1e-8 * d.norm());
        let even = theta_prime(-x, &c).unwrap() - d;
        assert!(even.norm() < 1e-14);
    }

    #[test]
    fn far_arguments_are_reduced() {
        let c = ctx();
        let x = C64::new(0.2, 0.03);
        let tau = c.tau();
        // theta(x + 3 tau) = -e^{-pi i (2x + tau)} ... applied three times
        let mut expect = theta(x, &c).unwrap();
        let mut y = x;
        for _ in 0..3 {
            expect *= -(-PI * I * (2.0 * y + tau)).exp();
            y += tau;
        }
        let got = theta(x + 3.0 * tau, &c).unwrap();
        assert!((got - expect).norm() <= 1e-12 * expect.norm());
    }

    #[test]
    fn brackets() {
        let c = ctx();
        assert_eq!(bracket(C64::new(0.0, 0.0), &c).unwrap().norm(), 0.0);
        assert_eq!(elliptic_factorial(&[C64::new(0.3, 0.0)], 0, &c).unwrap(), C64::new(1.0, 0.0));
        let z = ModularContext::new(0.25, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(bracket(C64::new(1.0, 0.0), &z), Err(Error::EtaZero));
        assert_eq!(elliptic_factorial(&[C64::new(1.0, 0.0)], 2, &z), Err(Error::EtaZero));
    }

    #[test]
    fn bracket_ratio_tends_to_pochhammer_ratio() {
        // p small and q close to one
        let tau_im = -(0.05f64.ln()) / (2.0 * PI);
        let c = ModularContext::new(tau_im, C64::new(1e-4, 0.0)).unwrap();
        let x = C64::new(0.7, 0.0);
        let y = C64::new(1.9, 0.0);
        let k = 4;
        let ratio = elliptic_factorial(&[x], k, &c).unwrap() / elliptic_factorial(&[y], k, &c).unwrap();
        let classical: f64 = (0..k).map(|j| (0.7 + j as f64) / (1.9 + j as f64)).product();
        assert!((ratio.re - classical).abs() < 1e-5 * classical);
    }

    #[test]
    fn classify_eta() {
        assert!(ModularContext::new(0.25, C64::new(0.1, 0.1)).is_err());
        assert!(ModularContext::new(-1.0, C64::new(0.1, 0.0)).is_err());
        let c = ModularContext::new(0.25, C64::new(0.0, 0.01)).unwrap();
        assert_eq!(c.eta_kind(), EtaKind::Imaginary);
        assert!((c.q().re - (-4.0 * PI * 0.01f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn ranges() {
        let r3 = ParamRange::new(RangeKind::RN, 3);
        assert!(r3.contains(C64::new(0.124, 0.0), 0.25));
        assert!(!r3.contains(C64::new(0.2, 0.0), 0.25));
        let r2 = ParamRange::new(RangeKind::RNminus1, 3);
        assert!(r2.contains(C64::new(0.15, 0.0), 0.25));
        let i3 = ParamRange::new(RangeKind::IN, 3);
        assert!(i3.contains(C64::new(0.0, 0.031), 0.25));
        assert!(!i3.contains(C64::new(0.0, 0.032), 0.25));
        assert!(!i3.contains(C64::new(0.01, 0.0), 0.25));
    }
}
