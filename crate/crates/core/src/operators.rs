//! Rains' difference operators `Delta(a)` and Sklyanin's generators `S_0..S_3`
//! acting on `Theta_N`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::identities::{normalized, rel_diff};
use crate::sampling::Sampler;
use crate::space::{coefficients, sigma, BasisParams, ThetaFn};
use crate::theta::{ModularContext, C64, I};

/// Parameters of `Delta(a)`: four numbers with zero sum, and the order acted on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaParams {
    pub a: [C64; 4],
    pub n: usize,
    pub ctx: ModularContext,
}

impl DeltaParams {
    /// Fix `a_4 = -a_1 - a_2 - a_3`.
    pub fn new(a1: C64, a2: C64, a3: C64, n: usize, ctx: ModularContext) -> Self {
        DeltaParams { a: [a1, a2, a3, -a1 - a2 - a3], n, ctx }
    }

    pub fn from_array(a: [C64; 4], n: usize, ctx: ModularContext) -> Result<Self> {
        let s: C64 = a.iter().sum();
        if s.norm() > 1e-12 {
            return Err(Error::InvalidParameter(format!("sum of a must vanish, got {s}")));
        }
        Ok(DeltaParams { a, n, ctx })
    }

    /// Same operator family with parameters `map(a_i)`.
    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        DeltaParams { a: self.a.map(f), ..*self }
    }

    pub fn apply(&self, f: &ThetaFn) -> Result<ThetaFn> {
        delta_apply(self, f)
    }
}

/// Largest `|theta(2x)|` treated as a removable singularity.
const HALF_LATTICE_TOL: f64 = 1e-9;

/// Nudge `x` off the half-lattice where `theta(2x) = 0`.
fn off_half_lattice(x: C64, ctx: &ModularContext) -> C64 {
    if ctx.lattice_distance(2.0 * x) < HALF_LATTICE_TOL {
        let dir = (1.0 + ctx.tau()) / (1.0 + ctx.tau()).norm();
        x + 1e-7 * dir
    } else {
        x
    }
}

/// Generic first-order difference operator
/// `[c(x) f(x + eta) - d(x) f(x - eta)] / theta(2x)`.
fn difference_operator<A, B>(order: usize, f: &ThetaFn, ctx: &ModularContext, up: A, down: B) -> ThetaFn
where
    A: Fn(C64) -> C64 + Send + Sync + 'static,
    B: Fn(C64) -> C64 + Send + Sync + 'static,
{
    let g = f.clone();
    let c = *ctx;
    let eta = ctx.eta();
    ThetaFn::new(order, move |x| {
        let x = off_half_lattice(x, &c);
        (up(x) * g.eval(x + eta) - down(x) * g.eval(x - eta)) / c.th(2.0 * x)
    })
}

/// `Delta(a) f(x) = [theta(x + a - N eta/2) f(x + eta) - theta(x - a + N eta/2) f(x - eta)] / theta(2x)`.
pub fn delta_apply(dp: &DeltaParams, f: &ThetaFn) -> Result<ThetaFn> {
    if f.order() != dp.n {
        return Err(Error::OrderMismatch { expected: dp.n, found: f.order() });
    }
    let (c, a) = (dp.ctx, dp.a);
    let half = 0.5 * dp.n as f64 * c.eta();
    let (c1, c2) = (c, c);
    Ok(difference_operator(
        dp.n,
        f,
        &c,
        move |x| c1.th_prod(a.iter().map(|&ai| x + ai - half)),
        move |x| c2.th_prod(a.iter().map(|&ai| x - ai + half)),
    ))
}

/// Residual of the generalized eigenvalue equation
/// `Delta(a) e_k(x; a1 - N eta/2 + eta, a2 - N eta/2 + eta)
///   = -theta(a1 + a2 + N eta, a1 + a3 + (2k - N) eta, a2 + a3 + (N - 2k) eta) e_k(x; a1 - N eta/2, a2 - N eta/2)`.
pub fn gev_residual(a1: C64, a2: C64, a3: C64, k: usize, n: usize, x: C64, ctx: &ModularContext) -> Result<f64> {
    if k > n {
        return Err(Error::IndexOutOfRange { k, n });
    }
    let eta = ctx.eta();
    let (kf, nf) = (k as f64, n as f64);
    let half = 0.5 * nf * eta;
    let upper = BasisParams::new(n, a1 - half + eta, a2 - half + eta, *ctx);
    let lower = BasisParams::new(n, a1 - half, a2 - half, *ctx);
    if !upper.valid() || !lower.valid() {
        return Err(Error::DegenerateParams("basis criterion fails".into()));
    }
    let dp = DeltaParams::new(a1, a2, a3, n, *ctx);
    let lhs = delta_apply(&dp, &upper.basis_fn(k)?)?.eval(x);
    let eig = -ctx.th_prod([a1 + a2 + nf * eta, a1 + a3 + (2.0 * kf - nf) * eta, a2 + a3 + (nf - 2.0 * kf) * eta]);
    Ok(rel_diff(lhs, eig * lower.e(k, x)))
}

/// The three coefficients of `Delta(a) e_k(x; lambda, mu)` in the basis
/// `e_j(x; lambda + eta, mu + eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tridiagonal {
    /// `C_{k-1}`, absent for `k = 0`
    pub lower: Option<C64>,
    /// `C_k`, extracted numerically
    pub diag: C64,
    /// `C_{k+1}`, absent for `k = N`
    pub upper: Option<C64>,
    /// residual of the three-term identity at fresh nodes
    pub residual: f64,
}

/// Closed form of `C_{k-1}`.
pub fn tridiag_lower(dp: &DeltaParams, lambda: C64, mu: C64, k: usize) -> C64 {
    let ctx = &dp.ctx;
    let eta = ctx.eta();
    let (kf, nf) = (k as f64, dp.n as f64);
    let d = lambda - mu;
    let shift = eta * (2.0 * kf - 1.0 - 0.5 * nf);
    let num = ctx.th_prod(dp.a.iter().map(|&ai| lambda + ai + shift))
        * ctx.th_prod([2.0 * kf * eta, d + 2.0 * kf * eta]);
    let den = ctx.th_prod([
        lambda + mu + 2.0 * nf * eta,
        d + 2.0 * (2.0 * kf - nf - 1.0) * eta,
        d + 2.0 * (2.0 * kf - nf) * eta,
    ]);
    num / den
}

/// Closed form of `C_{k+1}`.
pub fn tridiag_upper(dp: &DeltaParams, lambda: C64, mu: C64, k: usize) -> C64 {
    let ctx = &dp.ctx;
    let eta = ctx.eta();
    let (kf, nf) = (k as f64, dp.n as f64);
    let d = lambda - mu;
    let shift = eta * (1.5 * nf - 2.0 * kf - 1.0);
    let num = ctx.th_prod(dp.a.iter().map(|&ai| mu + ai + shift))
        * ctx.th_prod([2.0 * (kf - nf) * eta, d + 2.0 * (kf - nf) * eta]);
    let den = ctx.th_prod([
        lambda + mu + 2.0 * nf * eta,
        d + 2.0 * (2.0 * kf - nf) * eta,
        d + 2.0 * (2.0 * kf - nf + 1.0) * eta,
    ]);
    num / den
}

pub fn tridiag_coeffs(dp: &DeltaParams, lambda: C64, mu: C64, k: usize, seed: u64) -> Result<Tridiagonal> {
    let n = dp.n;
    if k > n {
        return Err(Error::IndexOutOfRange { k, n });
    }
    let ctx = &dp.ctx;
    let eta = ctx.eta();
    let source = BasisParams::new(n, lambda, mu, *ctx);
    let target = BasisParams::new(n, lambda + eta, mu + eta, *ctx);
    if !target.valid() {
        return Err(Error::DegenerateParams("target basis (lambda + eta, mu + eta) is not a basis".into()));
    }
    let image = delta_apply(dp, &source.basis_fn(k)?)?;
    let lower = (k > 0).then(|| tridiag_lower(dp, lambda, mu, k));
    let upper = (k < n).then(|| tridiag_upper(dp, lambda, mu, k));
    let off = |x: C64| {
        lower.map_or(C64::new(0.0, 0.0), |c| c * target.e(k - 1, x))
            + upper.map_or(C64::new(0.0, 0.0), |c| c * target.e(k + 1, x))
    };

    let mut s = Sampler::new(seed);
    let mut diag = None;
    for _ in 0..3 {
        let x = s.cell_point(ctx);
        let pivot = target.e(k, x);
        let scale = image.eval(x).norm().max(off(x).norm());
        if pivot.norm() > 1e-8 * scale && pivot.norm() > 0.0 {
            diag = Some((image.eval(x) - off(x)) / pivot);
            break;
        }
    }
    let diag = diag.ok_or(Error::SingularExtraction)?;

    let mut residual = 0.0_f64;
    for _ in 0..5 {
        let x = s.cell_point(ctx);
        let mut terms = vec![image.eval(x), -diag * target.e(k, x)];
        if let Some(c) = lower {
            terms.push(-c * target.e(k - 1, x));
        }
        if let Some(c) = upper {
            terms.push(-c * target.e(k + 1, x));
        }
        residual = residual.max(normalized(terms));
    }
    Ok(Tridiagonal { lower, diag, upper, residual })
}

/// All `N+1` coordinates of `Delta(a) e_k(x; lambda, mu)` in the shifted basis,
/// by a full solve. Returns `(max_{|j-k|>=2} |c_j| / max_j |c_j|, coefficients)`.
pub fn tridiag_locality(dp: &DeltaParams, lambda: C64, mu: C64, k: usize, seed: u64) -> Result<(f64, Vec<C64>)> {
    let ctx = &dp.ctx;
    let eta = ctx.eta();
    let source = BasisParams::new(dp.n, lambda, mu, *ctx);
    let target = BasisParams::new(dp.n, lambda + eta, mu + eta, *ctx);
    let image = delta_apply(dp, &source.basis_fn(k)?)?;
    let (coeffs, _) = coefficients(&image, &target, seed)?;
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let far = coeffs
        .iter()
        .enumerate()
        .filter(|&(j, _)| j.abs_diff(k) >= 2)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    Ok((if scale == 0.0 { 0.0 } else { far / scale }, coeffs))
}

/// `sigma Delta(a) sigma f`, evaluated through the explicit intermediate form.
pub fn sigma_delta_sigma_explicit(dp: &DeltaParams, f: &ThetaFn, x: C64) -> C64 {
    let ctx = &dp.ctx;
    let eta = ctx.eta();
    let tau = ctx.tau();
    let nf = dp.n as f64;
    let h = 0.5 + tau / 2.0;
    let x = off_half_lattice(x, ctx);
    let up = (-2.0 * PI * I * nf * eta).exp() * ctx.th_prod(dp.a.iter().map(|&ai| x + ai + h - 0.5 * nf * eta));
    let down = (2.0 * PI * I * nf * eta).exp() * ctx.th_prod(dp.a.iter().map(|&ai| x - ai + h + 0.5 * nf * eta));
    (PI * I * (tau + 4.0 * x)).exp() / ctx.th(2.0 * x) * (up * f.eval(x + eta) - down * f.eval(x - eta))
}

/// The operator on the right of
/// `sigma Delta(a) sigma = e^{2 pi i (a1 + a3 + tau/2)} Delta(a1 + 1/2 + tau/2, a2 + 1/2 - tau/2, a3 - 1/2 + tau/2, a4 - 1/2 - tau/2)`.
pub fn sigma_conjugate_params(dp: &DeltaParams) -> (C64, DeltaParams) {
    let [a1, a2, a3, a4] = dp.a;
    let h = dp.ctx.tau() / 2.0;
    let pref = (2.0 * PI * I * (a1 + a3 + h)).exp();
    let shifted = DeltaParams { a: [a1 + 0.5 + h, a2 + 0.5 - h, a3 - 0.5 + h, a4 - 0.5 - h], ..*dp };
    (pref, shifted)
}

/// Residual of both displayed forms of `sigma Delta(a) sigma f` at `x`.
pub fn sigma_conjugation_residual(dp: &DeltaParams, f: &ThetaFn, x: C64) -> Result<f64> {
    let ctx = &dp.ctx;
    let direct = sigma(&delta_apply(dp, &sigma(f, ctx))?, ctx).eval(x);
    let explicit = sigma_delta_sigma_explicit(dp, f, x);
    let (pref, shifted) = sigma_conjugate_params(dp);
    let rewritten = pref * delta_apply(&shifted, f)?.eval(x);
    Ok(rel_diff(direct, explicit).max(rel_diff(direct, rewritten)))
}

/// Coefficient function `s_i(x)` of Sklyanin's operator `S_i`.
pub fn s_coefficient(i: usize, x: C64, ctx: &ModularContext) -> C64 {
    let eta = ctx.eta();
    let h = ctx.tau() / 2.0;
    match i {
        0 => ctx.th(eta) * ctx.th(2.0 * x),
        1 => ctx.th(eta + 0.5) * ctx.th(2.0 * x + 0.5),
        2 => (PI * I * (0.5 + h + eta + 2.0 * x)).exp() * ctx.th(eta + 0.5 + h) * ctx.th(2.0 * x + 0.5 + h),
        3 => -(PI * I * (h + eta + 2.0 * x)).exp() * ctx.th(eta + h) * ctx.th(2.0 * x + h),
        _ => C64::new(f64::NAN, f64::NAN),
    }
}

fn check_generator(i: usize) -> Result<()> {
    if i > 3 {
        return Err(Error::InvalidParameter(format!("generator index {i} not in 0..=3")));
    }
    Ok(())
}

/// `S_i f(x) = [s_i(x - N eta/2) f(x + eta) - s_i(-x - N eta/2) f(x - eta)] / theta(2x)`.
pub fn s_apply(i: usize, f: &ThetaFn, ctx: &ModularContext) -> Result<ThetaFn> {
    check_generator(i)?;
    let half = 0.5 * f.order() as f64 * ctx.eta();
    let (c1, c2) = (*ctx, *ctx);
    Ok(difference_operator(
        f.order(),
        f,
        ctx,
        move |x| s_coefficient(i, x - half, &c1),
        move |x| s_coefficient(i, -x - half, &c2),
    ))
}

/// `S_i = c_i Delta(a^{(i)})`: the constant and the parameters.
pub fn s_as_delta(i: usize, n: usize, ctx: &ModularContext) -> Result<(C64, DeltaParams)> {
    check_generator(i)?;
    let eta = ctx.eta();
    let h = ctx.tau() / 2.0;
    let q4 = ctx.tau() / 4.0;
    let base = I * ctx.p_pow(0.125) / ctx.pp().powi(3);
    let re = |x: f64| C64::new(x, 0.0);
    let (c, a) = match i {
        0 => (base * ctx.th(eta), [re(0.0), re(0.5), h, -0.5 - h]),
        1 => (-base * ctx.th(eta + 0.5), [re(0.25), re(-0.25), 0.25 + h, -0.25 - h]),
        2 => (
            base * (PI * I * eta).exp() * ctx.th(eta + 0.5 + h),
            [0.25 + q4, 0.25 - q4, -0.25 + q4, -0.25 - q4],
        ),
        _ => (base * (PI * I * eta).exp() * ctx.th(eta + h), [q4, -q4, q4 + 0.5, -q4 - 0.5]),
    };
    Ok((c, DeltaParams::from_array(a, n, *ctx)?))
}

/// Residual of `S_i f(x) = c_i Delta(a^{(i)}) f(x)`.
pub fn s_proportionality_residual(i: usize, f: &ThetaFn, x: C64, ctx: &ModularContext) -> Result<f64> {
    let (c, dp) = s_as_delta(i, f.order(), ctx)?;
    let lhs = s_apply(i, f, ctx)?.eval(x);
    let rhs = c * delta_apply(&dp, f)?.eval(x);
    Ok(rel_diff(lhs, rhs))
}

/// Worst residual of `S_i f(x) = c_i Delta(a^{(i)}) f(x)` over `i = 0..=3`,
/// measured against the largest side over all four generators (some `S_i`
/// act as zero on low orders, where a per-generator ratio is rounding noise).
pub fn s_proportionality_joint(f: &ThetaFn, x: C64, ctx: &ModularContext) -> Result<f64> {
    let mut diff = 0.0_f64;
    let mut scale = 0.0_f64;
    for i in 0..4 {
        let (c, dp) = s_as_delta(i, f.order(), ctx)?;
        let lhs = s_apply(i, f, ctx)?.eval(x);
        let rhs = c * delta_apply(&dp, f)?.eval(x);
        diff = diff.max((lhs - rhs).norm());
        scale = scale.max(lhs.norm()).max(rhs.norm());
    }
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// Coefficients `w_i` with `Delta(a) = sum_i w_i S_i`.
pub fn delta_in_s_basis(dp: &DeltaParams) -> Result<[C64; 4]> {
    let ctx = &dp.ctx;
    let eta = ctx.eta();
    let h = ctx.tau() / 2.0;
    let [a1, a2, a3, a4] = dp.a;
    let denoms = [ctx.th(eta), ctx.th(eta + 0.5), ctx.th(eta + 0.5 + h), ctx.th(eta + h)];
    if let Some(d) = denoms.iter().find(|d| d.norm() < 1e-10) {
        return Err(Error::DegenerateEta(format!("denominator theta of modulus {:e}", d.norm())));
    }
    let tri = |s: C64| ctx.th_prod([a1 + a4 + s, a2 + a4 + s, a3 + a4 + s]);
    let zero = C64::new(0.0, 0.0);
    Ok([
        0.5 * tri(zero) / denoms[0],
        -0.5 * tri(C64::new(0.5, 0.0)) / denoms[1],
        -0.5 * (PI * I * (h + 0.5 + 2.0 * a4 - eta)).exp() * tri(0.5 + h) / denoms[2],
        0.5 * (PI * I * (h + 2.0 * a4 - eta)).exp() * tri(h) / denoms[3],
    ])
}

/// Residual of `Delta(a) f(x) = sum_i w_i S_i f(x)`.
pub fn delta_from_s(dp: &DeltaParams, f: &ThetaFn, x: C64) -> Result<f64> {
    let w = delta_in_s_basis(dp)?;
    let lhs = delta_apply(dp, f)?.eval(x);
    let mut terms = vec![lhs];
    for (i, wi) in w.iter().enumerate() {
        terms.push(-*wi * s_apply(i, f, &dp.ctx)?.eval(x));
    }
    Ok(normalized(terms))
}

/// The four-term theta identity behind [`delta_from_s`]:
/// `theta(x + a_1, ..., x + a_4) = 1/2 { ... }` with `sum a = 0`.
pub fn four_term_residual(x: C64, a: [C64; 4], ctx: &ModularContext) -> f64 {
    let h = ctx.tau() / 2.0;
    let [a1, a2, a3, a4] = a;
    let lhs = ctx.th_prod(a.iter().map(|&ai| x + ai));
    let tri = |s: C64| ctx.th_prod([a1 + a4 + s, a2 + a4 + s, a3 + a4 + s, 2.0 * x + s]);
    let e = (PI * I * (ctx.tau() + 2.0 * a4 + 2.0 * x)).exp();
    normalized([
        lhs,
        -0.5 * tri(C64::new(0.0, 0.0)),
        0.5 * tri(C64::new(0.5, 0.0)),
        -0.5 * e * tri(0.5 + h),
        0.5 * e * tri(h),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::membership_residual;

    fn ctx() -> ModularContext {
        ModularContext::new(0.25, C64::new(0.05, 0.0)).unwrap()
    }

    fn params(s: &mut Sampler, c: &ModularContext) -> (C64, C64, C64) {
        (s.cell_point(c), s.cell_point(c), s.cell_point(c))
    }

    #[test]
    fn order_zero_eigenvalue() {
        let c = ctx();
        let (a1, a2, a3) = (C64::new(0.1, 0.03), C64::new(0.37, 0.1), C64::new(0.61, 0.02));
        let dp = DeltaParams::new(a1, a2, a3, 0, c);
        let g = delta_apply(&dp, &ThetaFn::constant(0, C64::new(1.0, 0.0))).unwrap();
        let expect = -c.th_prod([a1 + a2, a1 + a3, a2 + a3]);
        for x in [C64::new(0.2, 0.05), C64::new(0.7, 0.11)] {
            assert!(rel_diff(g.eval(x), expect) < 1e-12);
        }
        assert!(gev_residual(a1, a2, a3, 0, 0, C64::new(0.3, 0.1), &c).unwrap() < 1e-12);
    }

    #[test]
    fn order_mismatch_is_typed() {
        let c = ctx();
        let dp = DeltaParams::new(C64::new(0.1, 0.0), C64::new(0.2, 0.0), C64::new(0.3, 0.0), 2, c);
        let f = ThetaFn::constant(1, C64::new(1.0, 0.0));
        assert!(matches!(delta_apply(&dp, &f), Err(Error::OrderMismatch { .. })));
        assert!(DeltaParams::from_array([C64::new(1.0, 0.0); 4], 1, c).is_err());
    }

    #[test]
    fn delta_preserves_space() {
        let c = ctx();
        let mut s = Sampler::new(8);
        let (a1, a2, a3) = params(&mut s, &c);
        let dp = DeltaParams::new(a1, a2, a3, 3, c);
        let bp = BasisParams::new(3, s.cell_point(&c), s.cell_point(&c), c);
        for k in 0..=3 {
            let g = delta_apply(&dp, &bp.basis_fn(k).unwrap()).unwrap();
            assert!(membership_residual(&g, &c, 6, 3) <= 1e-9);
        }
    }

    #[test]
    fn parameter_quasi_periodicity() {
        let c = ctx();
        let mut s = Sampler::new(9);
        let (a1, a2, a3) = params(&mut s, &c);
        let dp = DeltaParams::new(a1, a2, a3, 2, c);
        let f = BasisParams::new(2, s.cell_point(&c), s.cell_point(&c), c).basis_fn(1).unwrap();
        let x = s.cell_point(&c);
        let base = delta_apply(&dp, &f).unwrap().eval(x);
        let [b1, b2, b3, b4] = dp.a;
        let shifted = DeltaParams { a: [b1 + 1.0, b2 - 1.0, b3, b4], ..dp };
        assert!(rel_diff(delta_apply(&shifted, &f).unwrap().eval(x), base) <= 1e-9);
        let tau = c.tau();
        let shifted = DeltaParams { a: [b1 + tau, b2 - tau, b3, b4], ..dp };
        let pref = (2.0 * PI * I * (b2 - b1 - tau)).exp();
        assert!(rel_diff(delta_apply(&shifted, &f).unwrap().eval(x), pref * base) <= 1e-9);
    }

    #[test]
    fn eigenvalue_endpoints() {
        let c = ctx();
        let mut s = Sampler::new(10);
        for k in [0, 1, 3] {
            let (a1, a2, a3) = params(&mut s, &c);
            let x = s.cell_point(&c);
            assert!(gev_residual(a1, a2, a3, k, 3, x, &c).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn tridiagonal_expansion() {
        let c = ctx();
        let mut s = Sampler::new(12);
        let (a1, a2, a3) = params(&mut s, &c);
        let dp = DeltaParams::new(a1, a2, a3, 3, c);
        let (lambda, mu) = (s.cell_point(&c), s.cell_point(&c));
        for k in 0..=3 {
            let t = tridiag_coeffs(&dp, lambda, mu, k, 4).unwrap();
            assert!(t.residual <= 1e-9, "k={k}: {}", t.residual);
            assert_eq!(t.lower.is_none(), k == 0);
            assert_eq!(t.upper.is_none(), k == 3);
            let (far, coeffs) = tridiag_locality(&dp, lambda, mu, k, 5).unwrap();
            assert!(far <= 1e-9, "k={k}: {far}");
            if let Some(l) = t.lower {
                assert!(rel_diff(l, coeffs[k - 1]) < 1e-8);
            }
            assert!(rel_diff(t.diag, coeffs[k]) < 1e-8);
        }
        // the closed form for C_{-1} vanishes identically
        assert_eq!(tridiag_lower(&dp, lambda, mu, 0).norm(), 0.0);
    }

    #[test]
    fn tridiagonal_order_zero() {
        let c = ctx();
        let (a1, a2, a3) = (C64::new(0.1, 0.03), C64::new(0.37, 0.1), C64::new(0.61, 0.02));
        let dp = DeltaParams::new(a1, a2, a3, 0, c);
        let t = tridiag_coeffs(&dp, C64::new(0.2, 0.01), C64::new(0.4, 0.02), 0, 1).unwrap();
        assert!(t.lower.is_none() && t.upper.is_none());
        assert!(rel_diff(t.diag, -c.th_prod([a1 + a2, a1 + a3, a2 + a3])) < 1e-12);
    }

    #[test]
    fn sigma_conjugation() {
        let c = ctx();
        let mut s = Sampler::new(13);
        for _ in 0..3 {
            let (a1, a2, a3) = params(&mut s, &c);
            let dp = DeltaParams::new(a1, a2, a3, 3, c);
            let f = BasisParams::new(3, s.cell_point(&c), s.cell_point(&c), c).basis_fn(2).unwrap();
            assert!(sigma_conjugation_residual(&dp, &f, s.cell_point(&c)).unwrap() <= 1e-9);
        }
        let dp = DeltaParams::new(C64::new(0.1, 0.03), C64::new(0.37, 0.1), C64::new(0.61, 0.02), 0, c);
        let one = ThetaFn::constant(0, C64::new(1.0, 0.0));
        assert!(sigma_conjugation_residual(&dp, &one, C64::new(0.3, 0.07)).unwrap() <= 1e-11);
        let zero = C64::new(0.0, 0.0);
        let dp = DeltaParams::new(zero, zero, zero, 2, c);
        let f = BasisParams::new(2, C64::new(0.2, 0.1), C64::new(0.4, 0.05), c).basis_fn(1).unwrap();
        assert!(sigma_conjugation_residual(&dp, &f, C64::new(0.3, 0.07)).unwrap() <= 1e-9);
        let (pref, _) = sigma_conjugate_params(&dp);
        assert!((pref - (PI * I * c.tau()).exp()).norm() < 1e-15);
    }

    #[test]
    fn sklyanin_generators_are_proportional_to_delta() {
        let c = ctx();
        let mut s = Sampler::new(14);
        let bp = BasisParams::new(2, s.cell_point(&c), s.cell_point(&c), c);
        for i in 0..4 {
            for k in 0..=2 {
                let x = s.cell_point(&c);
                let r = s_proportionality_residual(i, &bp.basis_fn(k).unwrap(), x, &c).unwrap();
                assert!(r <= 1e-10, "S_{i}, k={k}: {r}");
            }
        }
        let one = ThetaFn::constant(0, C64::new(1.0, 0.0));
        assert!(s_proportionality_residual(0, &one, C64::new(0.3, 0.02), &c).unwrap() <= 1e-10);
        assert!(s_apply(4, &one, &c).is_err());
    }

    #[test]
    fn delta_reconstructed_from_generators() {
        let c = ctx();
        let mut s = Sampler::new(15);
        let bp = BasisParams::new(2, s.cell_point(&c), s.cell_point(&c), c);
        for _ in 0..3 {
            let (a1, a2, a3) = params(&mut s, &c);
            let dp = DeltaParams::new(a1, a2, a3, 2, c);
            for k in 0..=2 {
                let r = delta_from_s(&dp, &bp.basis_fn(k).unwrap(), s.cell_point(&c)).unwrap();
                assert!(r <= 1e-9, "{r}");
            }
            let a = dp.a;
            assert!(four_term_residual(s.cell_point(&c), a, &c) <= 1e-10);
        }
        // S_0's own parameters: only the S_0 coefficient survives
        let (_, dp0) = s_as_delta(0, 2, &c).unwrap();
        let w = delta_in_s_basis(&dp0).unwrap();
        assert!(w[1].norm() + w[2].norm() + w[3].norm() < 1e-12 * w[0].norm());
    }

    #[test]
    fn degenerate_eta_for_reconstruction() {
        let c = ModularContext::new(0.25, C64::new(0.0, 0.0)).unwrap();
        let dp = DeltaParams::new(C64::new(0.1, 0.0), C64::new(0.2, 0.0), C64::new(0.3, 0.0), 0, c);
        assert!(matches!(delta_in_s_basis(&dp), Err(Error::DegenerateEta(_))));
    }
}
