//! Sklyanin's invariant metric on `Theta_N`, evaluated by a midpoint product
//! rule on the period rectangle, and the closed forms it is checked against:
//! the reproducing-kernel constant `C`, the biorthogonal norms `Gamma_k`, and
//! the one- and two-dimensional integrals used to compute `C`.

use std::f64::consts::PI;
use std::sync::Arc;
use std::thread;

use crate::error::{Error, Result};
use crate::identities::{normalized, rel_diff};
use crate::linalg::CMatrix;
use crate::operators::{delta_apply, s_apply, DeltaParams};
use crate::space::{kernel_fn, kernel_k, sigma, BasisParams, ThetaFn};
use crate::theta::{
    in_metric_range, pochhammer_inf, theta_prime, EtaKind, ModularContext, ParamRange, RangeKind, C64, I,
};

/// Denominator factors below this modulus count as a pole.
pub const POLE_TOL: f64 = 1e-13;
/// Largest relative change tolerated when the grid is doubled.
pub const DOUBLING_TOL: f64 = 1e-6;

/// Midpoint nodes `(j + 1/2)/m1 + i (k + 1/2) Im(tau)/m2` on the period rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    pub m1: usize,
    pub m2: usize,
    pub tau_im: f64,
}

impl QuadratureGrid {
    pub fn new(m1: usize, m2: usize, tau_im: f64) -> Result<Self> {
        if m1 == 0 || m2 == 0 {
            return Err(Error::InvalidParameter("grid sizes must be positive".into()));
        }
        Ok(QuadratureGrid { m1, m2, tau_im })
    }

    pub fn doubled(&self) -> Self {
        QuadratureGrid { m1: 2 * self.m1, m2: 2 * self.m2, ..*self }
    }

    /// Area element `Im(tau) / (m1 m2)`.
    pub fn weight(&self) -> f64 {
        self.tau_im / (self.m1 * self.m2) as f64
    }

    /// Nodes in row-major order (`x` fastest).
    pub fn nodes(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.m1 * self.m2);
        for k in 0..self.m2 {
            let y = (k as f64 + 0.5) * self.tau_im / self.m2 as f64;
            for j in 0..self.m1 {
                v.push(C64::new((j as f64 + 0.5) / self.m1 as f64, y));
            }
        }
        v
    }

    /// `integral h(u) dx dy` over the rectangle.
    pub fn integrate<F>(&self, h: F) -> C64
    where
        F: Fn(C64) -> C64 + Sync,
    {
        let nodes = self.nodes();
        let terms = par_map(&nodes, |&u| h(u));
        pairwise_sum(&terms) * self.weight()
    }
}

/// Evaluate `f` over `xs` on scoped threads, preserving order.
fn par_map<T: Sync, F: Fn(&T) -> C64 + Sync>(xs: &[T], f: F) -> Vec<C64> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(16);
    if workers <= 1 || xs.len() < 256 {
        return xs.iter().map(&f).collect();
    }
    let chunk = xs.len().div_ceil(workers);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = xs
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<C64>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("quadrature worker panicked")).collect()
    })
}

/// Fixed-tree summation, independent of thread count.
pub fn pairwise_sum(xs: &[C64]) -> C64 {
    match xs.len() {
        0 => C64::new(0.0, 0.0),
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `M(u, v) = theta(2u) theta(2v) / (e^{2 pi i u (N+2)} prod_{k=0}^{N+1} theta(u +- v + (2k-N-1) eta + 1/2 + tau/2))`.
pub fn weight_m(u: C64, v: C64, n: usize, ctx: &ModularContext) -> Result<C64> {
    let nf = n as f64;
    let h = 0.5 + ctx.tau() / 2.0;
    let mut den = (2.0 * PI * I * u * (nf + 2.0)).exp();
    for k in 0..n + 2 {
        let c = (2.0 * k as f64 - nf - 1.0) * ctx.eta() + h;
        for z in [u + v + c, u - v + c] {
            let t = ctx.th(z);
            if !(t.norm() >= POLE_TOL) {
                return Err(Error::PoleHit { modulus: t.norm() });
            }
            den *= t;
        }
    }
    Ok(ctx.th(2.0 * u) * ctx.th(2.0 * v) / den)
}

fn neg_root_p(w: C64, ctx: &ModularContext) -> C64 {
    pochhammer_inf(&[-ctx.p().sqrt() * (2.0 * PI * I * w).exp()], ctx.p())
}

/// The nonnegative product form of `M(u, conj u)` for `eta` real or imaginary:
/// `p^{(N+2)/4} / (p;p)^{2N+4} |theta(2u)|^2 prod_k 1/(|s_k|^2 |d_k^+| |d_k^-|)`,
/// with `s_k = (-sqrt(p) e^{2 pi i (u + conj u + c_k)}; p)`,
/// `d_k^+- = (-sqrt(p) e^{2 pi i (+-(u - conj u) + c_k)}; p)` and `c_k = (2k - N - 1) eta`.
pub fn weight_m_nonneg(u: C64, n: usize, ctx: &ModularContext) -> f64 {
    let nf = n as f64;
    let (s, d) = (u + u.conj(), u - u.conj());
    let mut den = 1.0;
    for k in 0..n + 2 {
        let c = (2.0 * k as f64 - nf - 1.0) * ctx.eta();
        den *= neg_root_p(s + c, ctx).norm_sqr() * neg_root_p(d + c, ctx).norm() * neg_root_p(-d + c, ctx).norm();
    }
    ctx.p_pow(0.25 * (nf + 2.0)) / ctx.pp().powi(2 * n as i32 + 4) * ctx.th(2.0 * u).norm_sqr() / den
}

/// The variant `p^{(N+2)/4} / (p;p)^{2N+2} |theta(2u)|^2 prod_k |1/(-sqrt(p) e^{2 pi i (u +- conj u + c_k)}; p)|^2`,
/// kept for comparison with [`weight_m_nonneg`]; it does not equal `M(u, conj u)`.
pub fn weight_m_nonneg_variant(u: C64, n: usize, ctx: &ModularContext) -> f64 {
    let nf = n as f64;
    let mut den = 1.0;
    for k in 0..n + 2 {
        let c = (2.0 * k as f64 - nf - 1.0) * ctx.eta();
        den *= neg_root_p(u + u.conj() + c, ctx).norm_sqr() * neg_root_p(u - u.conj() + c, ctx).norm_sqr();
    }
    ctx.p_pow(0.25 * (nf + 2.0)) / ctx.pp().powi(2 * n as i32 + 2) * ctx.th(2.0 * u).norm_sqr() / den
}

/// Distance of `t` to the nearest point of `period * (Z + 1/2)`.
fn dist_half_offset(t: f64, period: f64) -> f64 {
    let r = t / period - 0.5;
    (r - r.round()).abs() * period
}

/// Pole-freeness of `M(u, conj u)`: each `(2k - N - 1) eta` must avoid
/// `(Z + 1/2 + iR)` and `(tau (Z + 1/2) + R)`.
pub fn weight_valid(n: usize, ctx: &ModularContext) -> bool {
    let nf = n as f64;
    (0..n + 2).all(|k| {
        let c = (2.0 * k as f64 - nf - 1.0) * ctx.eta();
        dist_half_offset(c.re, 1.0) >= 1e-6 && dist_half_offset(c.im, ctx.tau_im()) >= 1e-6
    })
}

/// The metric on `Theta_N` with precomputed weights `M(u, conj u) dx dy` at the grid nodes.
#[derive(Debug, Clone)]
pub struct MetricContext {
    pub ctx: ModularContext,
    pub n: usize,
    pub grid: QuadratureGrid,
    /// `eta` lies in `R_N` or `I_N`
    pub in_range: bool,
    nodes: Arc<Vec<C64>>,
    weights: Arc<Vec<f64>>,
}

impl MetricContext {
    pub fn new(ctx: ModularContext, n: usize, m1: usize, m2: usize) -> Result<Self> {
        Self::with_grid(ctx, n, QuadratureGrid::new(m1, m2, ctx.tau_im())?)
    }

    pub fn with_grid(ctx: ModularContext, n: usize, grid: QuadratureGrid) -> Result<Self> {
        if !weight_valid(n, &ctx) {
            return Err(Error::InvalidParameter(format!(
                "weight has poles for eta = {} and N = {n}",
                ctx.eta()
            )));
        }
        let nodes = grid.nodes();
        let w = grid.weight();
        let raw = par_map(&nodes, |&u| weight_m(u, u.conj(), n, &ctx).map_or(C64::new(f64::NAN, 0.0), |m| m));
        if let Some(bad) = raw.iter().find(|m| !m.re.is_finite()) {
            return Err(Error::PoleHit { modulus: bad.norm() });
        }
        let weights = raw.iter().map(|m| m.re * w).collect();
        Ok(MetricContext {
            ctx,
            n,
            grid,
            in_range: in_metric_range(ctx.eta(), n, ctx.tau_im()),
            nodes: Arc::new(nodes),
            weights: Arc::new(weights),
        })
    }

    pub fn doubled(&self) -> Result<Self> {
        Self::with_grid(self.ctx, self.n, self.grid.doubled())
    }

    /// `integral h(u) M(u, conj u) dx dy`.
    pub fn integrate<F>(&self, h: F) -> C64
    where
        F: Fn(C64) -> C64 + Sync,
    {
        let pairs: Vec<(C64, f64)> = self.nodes.iter().copied().zip(self.weights.iter().copied()).collect();
        pairwise_sum(&par_map(&pairs, |&(u, w)| h(u) * w))
    }

    fn check_order(&self, f: &ThetaFn) -> Result<()> {
        if f.order() != self.n {
            return Err(Error::OrderMismatch { expected: self.n, found: f.order() });
        }
        Ok(())
    }

    /// `<f, g> = integral f(u) conj(g(u)) M(u, conj u) dx dy`.
    pub fn inner(&self, f: &ThetaFn, g: &ThetaFn) -> Result<C64> {
        self.check_order(f)?;
        self.check_order(g)?;
        Ok(self.integrate(|u| f.eval(u) * g.eval(u).conj()))
    }

    /// `<f, g>` together with its relative change when the grid is doubled.
    pub fn inner_with_doubling(&self, f: &ThetaFn, g: &ThetaFn) -> Result<(C64, f64)> {
        let coarse = self.inner(f, g)?;
        let fine = self.doubled()?.inner(f, g)?;
        Ok((fine, rel_diff(coarse, fine)))
    }

    /// `<f, g>` on the doubled grid, rejected if doubling moved it by more than [`DOUBLING_TOL`].
    pub fn inner_checked(&self, f: &ThetaFn, g: &ThetaFn) -> Result<C64> {
        let (v, change) = self.inner_with_doubling(f, g)?;
        if change > DOUBLING_TOL {
            return Err(Error::GridTooCoarse { relative_change: change });
        }
        Ok(v)
    }

    pub fn norm_sqr(&self, f: &ThetaFn) -> Result<f64> {
        Ok(self.inner(f, f)?.re)
    }
}

/// `<f, g>` on the context's own grid.
pub fn inner_product(f: &ThetaFn, g: &ThetaFn, mc: &MetricContext) -> Result<C64> {
    mc.inner(f, g)
}

fn real_regime(ctx: &ModularContext) -> bool {
    ctx.eta_kind() != EtaKind::Imaginary
}

/// Residual of `Delta(a)^* = -sigma Delta(-conj a) sigma` (eta real) or
/// `Delta(a)^* = sigma Delta(conj a) sigma` (eta imaginary).
pub fn adjoint_residual(dp: &DeltaParams, f: &ThetaFn, g: &ThetaFn, mc: &MetricContext) -> Result<f64> {
    let ctx = &mc.ctx;
    let real = real_regime(ctx);
    let dual = dp.map(|a| if real { -a.conj() } else { a.conj() });
    let lhs = mc.inner(&delta_apply(dp, f)?, g)?;
    let sds = sigma(&delta_apply(&dual, &sigma(g, ctx))?, ctx);
    let rhs = mc.inner(f, &sds)?;
    Ok(normalized([lhs, if real { rhs } else { -rhs }]))
}

/// Residual of `S_i^* = S_i` (eta real) or `S_i^* = -S_i` (eta imaginary).
pub fn s_selfadjoint_residual(i: usize, f: &ThetaFn, g: &ThetaFn, mc: &MetricContext) -> Result<f64> {
    let ctx = &mc.ctx;
    let lhs = mc.inner(&s_apply(i, f, ctx)?, g)?;
    let rhs = mc.inner(f, &s_apply(i, g, ctx)?)?;
    Ok(normalized([lhs, if real_regime(ctx) { -rhs } else { rhs }]))
}

/// Joint form of [`s_selfadjoint_residual`] over `i = 0..=3`, normalized by
/// the largest inner product among the four generators.
pub fn s_selfadjoint_joint(f: &ThetaFn, g: &ThetaFn, mc: &MetricContext) -> Result<f64> {
    let ctx = &mc.ctx;
    let sign = if real_regime(ctx) { -1.0 } else { 1.0 };
    let mut diff = 0.0_f64;
    let mut scale = 0.0_f64;
    for i in 0..4 {
        let lhs = mc.inner(&s_apply(i, f, ctx)?, g)?;
        let rhs = mc.inner(f, &s_apply(i, g, ctx)?)?;
        diff = diff.max((lhs + sign * rhs).norm());
        scale = scale.max(lhs.norm()).max(rhs.norm());
    }
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// `C = 2 eta p^{3/8} / (theta(2(N+1) eta) (p;p)^3)`, and its limit
/// `p^{1/4} / (2 pi (N+1) (p;p)^6)` at `eta = 0`.
pub fn constant_c(n: usize, ctx: &ModularContext) -> Result<C64> {
    let nf = n as f64;
    if ctx.eta_kind() == EtaKind::Zero {
        return Ok(C64::new(ctx.p_pow(0.25) / (2.0 * PI * (nf + 1.0) * ctx.pp().powi(6)), 0.0));
    }
    let t = ctx.th(2.0 * (nf + 1.0) * ctx.eta());
    if t.norm() < 1e-12 {
        return Err(Error::DegenerateEta(format!("theta(2(N+1) eta) = {t}")));
    }
    Ok(2.0 * ctx.eta() * ctx.p_pow(0.375) / (t * ctx.pp().powi(3)))
}

/// `integral K(u, conj u) M(u, conj u) dx dy / (N+1)` against `C`.
pub fn trace_residual(mc: &MetricContext) -> Result<f64> {
    let (n, ctx) = (mc.n, mc.ctx);
    let integral = mc.integrate(|u| kernel_k(u, u.conj(), n, &ctx));
    Ok(rel_diff(integral / (n as f64 + 1.0), constant_c(n, &ctx)?))
}

/// `|f(u) - C^{-1} <f, K_u>| / max(1, |f(u)|)` with `K_u(z) = K(z, conj u)`.
pub fn reproducing_residual(f: &ThetaFn, u: C64, mc: &MetricContext) -> Result<f64> {
    let k_u = kernel_fn(u.conj(), mc.n, &mc.ctx);
    let projected = mc.inner(f, &k_u)? / constant_c(mc.n, &mc.ctx)?;
    let fu = f.eval(u);
    Ok((fu - projected).norm() / fu.norm().max(1.0))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn nonzero(v: C64, what: &str) -> Result<C64> {
    if !(v.norm() > 1e-300) {
        return Err(Error::DegenerateParams(format!("{what} vanishes")));
    }
    Ok(v)
}

/// `Gamma_k = e^{pi i N (tau - 1)/2} [lambda]/[lambda + 2k] [1, lambda + N + 1]_k / [-N, lambda]_k
/// [lambda + 1, (a1 + a2 - N eta)/2 eta]_N` with `lambda = (a1 - a2 - 2 N eta)/2 eta`.
pub fn gamma_k(a1: C64, a2: C64, k: usize, n: usize, ctx: &ModularContext) -> Result<C64> {
    if k > n {
        return Err(Error::IndexOutOfRange { k, n });
    }
    let nf = n as f64;
    let pref = (PI * I * nf * (ctx.tau() - 1.0) / 2.0).exp();
    if ctx.eta_kind() == EtaKind::Zero {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let th = (ctx.th(a1 + a2) * ctx.th(a1 - a2)).powi(n as i32);
        return Ok(pref * sign / binomial(n, k) * th);
    }
    let eta = ctx.eta();
    let lambda = (a1 - a2 - 2.0 * nf * eta) / (2.0 * eta);
    let s = (a1 + a2 - nf * eta) / (2.0 * eta);
    let one = C64::new(1.0, 0.0);
    let num = ctx.br(lambda) * ctx.br_fact(one, k) * ctx.br_fact(lambda + nf + 1.0, k);
    let den = nonzero(ctx.br(lambda + 2.0 * k as f64), "[lambda + 2k]")?
        * nonzero(ctx.br_fact(C64::new(-nf, 0.0), k), "[-N]_k")?
        * nonzero(ctx.br_fact(lambda, k), "[lambda]_k")?;
    Ok(pref * num / den * ctx.br_fact(lambda + 1.0, n) * ctx.br_fact(s, n))
}

/// The one-step quotient `Gamma_{k+1} / Gamma_k` written in thetas.
pub fn gamma_step_ratio(a1: C64, a2: C64, k: usize, n: usize, ctx: &ModularContext) -> C64 {
    let eta = ctx.eta();
    let (kf, nf) = (k as f64, n as f64);
    let d = a1 - a2;
    let num = ctx.th_prod([2.0 * (kf + 1.0) * eta, d + 2.0 * (kf + 1.0) * eta, d + 2.0 * (2.0 * kf - nf) * eta]);
    let den = ctx.th_prod([2.0 * (kf - nf) * eta, d + 2.0 * (kf - nf) * eta, d + 2.0 * (2.0 * kf + 2.0 - nf) * eta]);
    num / den
}

/// The biorthogonal pair: `e_k = e_k(x; a1 - N eta/2, a2 - N eta/2)` and the
/// parameters `(-+conj a2 - N eta/2 + eta, -+conj a1 - N eta/2 + eta)` whose
/// basis, after `sigma`, gives `f_k` (minus sign for eta real, plus for imaginary).
pub fn biorthogonal_params(a1: C64, a2: C64, n: usize, ctx: &ModularContext) -> (BasisParams, BasisParams) {
    let eta = ctx.eta();
    let half = 0.5 * n as f64 * eta;
    let s = if real_regime(ctx) { -1.0 } else { 1.0 };
    let e = BasisParams::new(n, a1 - half, a2 - half, *ctx);
    let f = BasisParams::new(n, s * a2.conj() - half + eta, s * a1.conj() - half + eta, *ctx);
    (e, f)
}

/// `f_k = sigma e_k(x; -+conj a2 - N eta/2 + eta, -+conj a1 - N eta/2 + eta)`.
pub fn dual_basis(a1: C64, a2: C64, n: usize, ctx: &ModularContext) -> Result<Vec<ThetaFn>> {
    let (_, fp) = biorthogonal_params(a1, a2, n, ctx);
    (0..=n).map(|k| Ok(sigma(&fp.basis_fn(k)?, ctx))).collect()
}

/// `G[k][l] = <e_k, f_l>` by quadrature.
pub fn biorthogonality_gram(a1: C64, a2: C64, mc: &MetricContext) -> Result<CMatrix> {
    let (n, ctx) = (mc.n, &mc.ctx);
    let (ep, _) = biorthogonal_params(a1, a2, n, ctx);
    if !ep.valid() {
        return Err(Error::InvalidBasis(format!("(a1, a2) = ({a1}, {a2}) does not give a basis")));
    }
    let es = ep.basis();
    let fs = dual_basis(a1, a2, n, ctx)?;
    let mut g = CMatrix::zeros(n + 1, n + 1);
    for k in 0..=n {
        for l in 0..=n {
            g[(k, l)] = mc.inner(&es[k], &fs[l])?;
        }
    }
    Ok(g)
}

/// Comparison of a Gram matrix with `diag(C Gamma_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramCheck {
    /// `max_{k != l} |G_kl| / max_k |G_kk|`
    pub off_diagonal: f64,
    /// `max_k |G_kk - C Gamma_k| / |C Gamma_k|`
    pub diagonal: f64,
}

pub fn gram_check(a1: C64, a2: C64, mc: &MetricContext) -> Result<GramCheck> {
    let g = biorthogonality_gram(a1, a2, mc)?;
    let c = constant_c(mc.n, &mc.ctx)?;
    let n = mc.n;
    let scale = (0..=n).map(|k| g[(k, k)].norm()).fold(0.0, f64::max);
    let mut off = 0.0_f64;
    let mut diag = 0.0_f64;
    for k in 0..=n {
        for l in 0..=n {
            if k != l {
                off = off.max(g[(k, l)].norm() / scale);
            }
        }
        let expect = c * gamma_k(a1, a2, k, n, &mc.ctx)?;
        diag = diag.max((g[(k, k)] - expect).norm() / expect.norm());
    }
    Ok(GramCheck { off_diagonal: off, diagonal: diag })
}

/// `|Gamma_{k+1}/Gamma_k - step ratio|`, relative, maximized over `k < N`.
pub fn gamma_recurrence_residual(a1: C64, a2: C64, n: usize, ctx: &ModularContext) -> Result<f64> {
    let mut worst = 0.0_f64;
    for k in 0..n {
        let r = gamma_k(a1, a2, k + 1, n, ctx)? / gamma_k(a1, a2, k, n, ctx)?;
        worst = worst.max(rel_diff(r, gamma_step_ratio(a1, a2, k, n, ctx)));
    }
    Ok(worst)
}

const LEMMA_NODES: usize = 256;

/// `I(gamma) = int_0^1 theta'/theta(2x + gamma) dx` and
/// `J(gamma) = int_0^{Im tau} theta'/theta(2iy + gamma) dy` by the midpoint rule.
pub fn lemma_integrals(gamma: C64, ctx: &ModularContext) -> Result<(C64, C64)> {
    let t = ctx.tau_im();
    if dist_half_offset(gamma.im - 0.5 * t, t) < 1e-6 {
        return Err(Error::InvalidParameter("I(gamma) path meets zeros: gamma in R + tau Z".into()));
    }
    if dist_half_offset(gamma.re - 0.5, 1.0) < 1e-6 {
        return Err(Error::InvalidParameter("J(gamma) path meets zeros: gamma in Z + iR".into()));
    }
    let log_deriv = |z: C64| -> Result<C64> { Ok(theta_prime(z, ctx)? / crate::theta::theta(z, ctx)?) };
    let m = LEMMA_NODES as f64;
    let mut xi = Vec::with_capacity(LEMMA_NODES);
    let mut yj = Vec::with_capacity(LEMMA_NODES);
    for j in 0..LEMMA_NODES {
        let s = (j as f64 + 0.5) / m;
        xi.push(log_deriv(2.0 * s + gamma)?);
        yj.push(log_deriv(2.0 * I * s * t + gamma)?);
    }
    Ok((pairwise_sum(&xi) / m, pairwise_sum(&yj) * t / m))
}

/// Closed form of `I`: `-i pi` on `0 < Im gamma < Im tau`, extended by `I(gamma + tau) = I(gamma) - 2 pi i`.
pub fn lemma_i_closed(gamma: C64, ctx: &ModularContext) -> C64 {
    let n = (gamma.im / ctx.tau_im()).floor();
    -I * PI - 2.0 * PI * I * n
}

/// Closed form of `J`: `2 pi (1/2 - gamma - tau)` on `0 < Re gamma < 1`, extended 1-periodically.
pub fn lemma_j_closed(gamma: C64, ctx: &ModularContext) -> C64 {
    let g = gamma - gamma.re.floor();
    2.0 * PI * (0.5 - g - ctx.tau())
}

/// Closed form `p^{-1/8} (2 gamma - 1 - tau) / (theta(2 gamma) (p;p)^3)` of the
/// integral of `theta(2u) theta(2 conj u) / theta(u +- conj u +- gamma)`.
/// At `gamma = 1/2 + tau/2` both numerator and `theta(2 gamma)` vanish and the
/// quotient is replaced by its limit `1 / theta'(1 + tau)`.
pub fn fil_closed(gamma: C64, ctx: &ModularContext) -> C64 {
    let lin = 2.0 * gamma - 1.0 - ctx.tau();
    let q = if lin.norm() < 1e-9 {
        1.0 / theta_prime(1.0 + ctx.tau(), ctx).unwrap_or(C64::new(f64::NAN, f64::NAN))
    } else {
        lin / ctx.th(2.0 * gamma)
    };
    ctx.p_pow(-0.125) * q / ctx.pp().powi(3)
}

/// Residual of the two-dimensional integral against [`fil_closed`]; the grid
/// is doubled once and a change above [`DOUBLING_TOL`] is reported as `GridTooCoarse`.
pub fn fil_integral(gamma: C64, ctx: &ModularContext, grid: QuadratureGrid) -> Result<f64> {
    if !(gamma.re > 0.0 && gamma.re < 1.0 && gamma.im > 0.0 && gamma.im < ctx.tau_im()) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} outside 0 < Re < 1, 0 < Im < Im tau")));
    }
    let c = *ctx;
    let h = move |u: C64| {
        let ub = u.conj();
        c.th(2.0 * u) * c.th(2.0 * ub) / c.th_prod([u + ub + gamma, u + ub - gamma, u - ub + gamma, u - ub - gamma])
    };
    let coarse = grid.integrate(h);
    let fine = grid.doubled().integrate(h);
    let change = rel_diff(coarse, fine);
    if !(change <= DOUBLING_TOL) {
        return Err(Error::GridTooCoarse { relative_change: change });
    }
    Ok(rel_diff(fine, fil_closed(gamma, ctx)))
}

/// One analytic value `C^{-1} ||e_k||^2` on the orthogonal specialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityRecord {
    pub eta: C64,
    pub k: usize,
    pub value: C64,
    /// `|Im value| / |value|`
    pub rel_imag: f64,
    pub positive: bool,
}

/// `a2 = -+conj a1 + eta - 1/2 - tau/2`, which makes `e_k` and `f_k` proportional.
pub fn orthogonal_a2(a1: C64, ctx: &ModularContext) -> C64 {
    let s = if real_regime(ctx) { -1.0 } else { 1.0 };
    s * a1.conj() + ctx.eta() - 0.5 - ctx.tau() / 2.0
}

/// `c_k` with `f_k = c_k e_k` on the orthogonal specialization, read off at `x0`
/// and confirmed at a second node.
pub fn proportionality_constant(a1: C64, k: usize, n: usize, ctx: &ModularContext) -> Result<C64> {
    let a2 = orthogonal_a2(a1, ctx);
    let (ep, _) = biorthogonal_params(a1, a2, n, ctx);
    let fk = &dual_basis(a1, a2, n, ctx)?[k];
    let ratio = |x: C64| fk.eval(x) / ep.e(k, x);
    let (x0, x1) = (C64::new(0.213, 0.037), C64::new(0.617, 0.091));
    let c = ratio(x0);
    if !c.is_finite() || rel_diff(c, ratio(x1)) > 1e-8 {
        return Err(Error::DegenerateParams("f_k is not proportional to e_k".into()));
    }
    Ok(c)
}

/// `C^{-1} ||e_k||^2 = Gamma_k / conj(c_k)` on the orthogonal specialization for
/// each `eta` sample, without quadrature. Samples must lie in `R_{N-1}` or `I_{N-1}`.
pub fn positivity_extended(a1: C64, n: usize, etas: &[C64], ctx: &ModularContext) -> Result<Vec<PositivityRecord>> {
    if n == 0 {
        return Err(Error::InvalidParameter("the extended range needs N >= 1".into()));
    }
    let mut out = Vec::new();
    for &eta in etas {
        let c = ctx.with_eta(eta)?;
        let r = ParamRange::new(RangeKind::RNminus1, n);
        let i = ParamRange::new(RangeKind::INminus1, n);
        if !(r.contains(eta, c.tau_im()) || i.contains(eta, c.tau_im())) || c.eta_kind() == EtaKind::Zero {
            return Err(Error::InvalidParameter(format!("eta = {eta} outside R_(N-1) and I_(N-1)")));
        }
        let a2 = orthogonal_a2(a1, &c);
        for k in 0..=n {
            let ck = proportionality_constant(a1, k, n, &c)?;
            let value = gamma_k(a1, a2, k, n, &c)? / ck.conj();
            let rel_imag = value.im.abs() / value.norm();
            out.push(PositivityRecord { eta, k, value, rel_imag, positive: value.re > 0.0 && rel_imag <= 1e-8 });
        }
    }
    Ok(out)
}
