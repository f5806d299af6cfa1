//! Ruijsenaars' elliptic gamma function and the gamma-function form of the
//! reproducing-kernel integral over the annulus `p < |z| < 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::identities::rel_diff;
use crate::metric::{constant_c, fil_closed, weight_m, POLE_TOL};
use crate::space::kernel_k;
use crate::theta::{pochhammer_inf, EtaKind, ModularContext, C64, I};

const MAX_FACTORS: usize = 20_000;

/// `Gamma(x; p, q) = prod_{j,k >= 0} (1 - p^{j+1} q^{k+1} / x) / (1 - p^j q^k x)`.
pub fn elliptic_gamma(x: C64, p: f64, q: C64) -> Result<C64> {
    if !(p > 0.0 && p < 1.0) || !(q.norm() > 0.0 && q.norm() < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < p < 1 and 0 < |q| < 1, got p = {p}, q = {q}")));
    }
    if x.norm() == 0.0 {
        return Err(Error::PoleHit { modulus: 0.0 });
    }
    let one = C64::new(1.0, 0.0);
    let pq_x = p * q / x;
    let scale = x.norm().max(pq_x.norm());
    let mut prod = one;
    let mut pj = 1.0;
    let mut factors = 0;
    while pj * scale > f64::EPSILON * 0.25 {
        let mut qk = one;
        while pj * qk.norm() * scale > f64::EPSILON * 0.25 {
            let den = one - pj * qk * x;
            if den.norm() < POLE_TOL {
                return Err(Error::PoleHit { modulus: den.norm() });
            }
            prod *= (one - pj * qk * pq_x) / den;
            qk *= q;
            factors += 1;
            if factors > MAX_FACTORS {
                return Err(Error::NonConvergence { max_terms: MAX_FACTORS });
            }
        }
        pj *= p;
    }
    Ok(prod)
}

/// Product of `elliptic_gamma` over several arguments.
pub fn elliptic_gamma_prod(xs: &[C64], p: f64, q: C64) -> Result<C64> {
    xs.iter().try_fold(C64::new(1.0, 0.0), |acc, &x| Ok(acc * elliptic_gamma(x, p, q)?))
}

/// `|Gamma(x) Gamma(pq/x) - 1|`.
pub fn gamma_reflection_residual(x: C64, p: f64, q: C64) -> Result<f64> {
    Ok((elliptic_gamma(x, p, q)? * elliptic_gamma(p * q / x, p, q)? - 1.0).norm())
}

/// Relative residual of `Gamma(qx) / Gamma(x) = (x, p/x; p)`.
pub fn gamma_shift_residual(x: C64, p: f64, q: C64) -> Result<f64> {
    let lhs = elliptic_gamma(q * x, p, q)? / elliptic_gamma(x, p, q)?;
    Ok(rel_diff(lhs, pochhammer_inf(&[x, p / x], p)))
}

fn signs(a: C64, b: C64) -> [C64; 4] {
    [a * b, a / b, b / a, 1.0 / (a * b)]
}

fn require_imaginary(ctx: &ModularContext) -> Result<()> {
    if ctx.eta_kind() != EtaKind::Imaginary {
        return Err(Error::InvalidParameter("the gamma form needs |q| < 1, i.e. eta imaginary".into()));
    }
    Ok(())
}

/// Gamma-form integrand at multiplicative coordinates, without the `dxdy/|z|^4` measure.
/// `zb` is the conjugate coordinate, `v` and `wb` the multiplicative images of `v` and `conj w`.
pub fn bdi_gamma_integrand(z: C64, zb: C64, v: C64, wb: C64, n: usize, ctx: &ModularContext) -> Result<C64> {
    let (p, q) = (ctx.p(), ctx.q());
    let nf = n as f64;
    let t = -p.sqrt() * q.powf(0.5 * (nf + 1.0));
    let t3 = -p.sqrt() * q.powf(0.5 * (nf + 3.0));
    let num: Vec<C64> = signs(v, zb).iter().chain(signs(wb, z).iter()).map(|&s| t * s).collect();
    let mut den = vec![z * z, zb * zb, p / (z * z), p / (zb * zb)];
    den.extend(signs(z, zb).iter().map(|&s| t3 * s));
    Ok(elliptic_gamma_prod(&num, p, q)? / elliptic_gamma_prod(&den, p, q)?)
}

/// Right-hand side as displayed, `2 pi log(q) p^{-1/2} q^{(N+1)/2} / (p, p, q^{N+1}, p q^{-N-1}; p) Gamma(t v^+- wb^+-)`,
/// principal branch of `log q`. For `0 < q < 1` this is negative where the
/// integral is positive; see [`bdi_rhs`].
pub fn bdi_rhs_displayed(v: C64, wb: C64, n: usize, ctx: &ModularContext) -> Result<C64> {
    let (p, q) = (ctx.p(), ctx.q());
    let nf = n as f64;
    let qn = q.powf(nf + 1.0);
    let t = -p.sqrt() * q.powf(0.5 * (nf + 1.0));
    let pref = 2.0 * PI * q.ln() * q.powf(0.5 * (nf + 1.0)) / p.sqrt()
        / pochhammer_inf(&[C64::new(p, 0.0), C64::new(p, 0.0), qn, p / qn], p);
    let g: Vec<C64> = signs(v, wb).iter().map(|&s| t * s).collect();
    Ok(pref * elliptic_gamma_prod(&g, p, q)?)
}

/// Right-hand side of the annulus identity with `2 pi log(1/q)` in place of
/// `2 pi log(q)`, the sign that makes both sides agree.
pub fn bdi_rhs(v: C64, wb: C64, n: usize, ctx: &ModularContext) -> Result<C64> {
    Ok(-bdi_rhs_displayed(v, wb, n, ctx)?)
}

/// Theta-form integrand `K(v, conj z) K(z, conj w) M(z, conj z)` on the torus.
pub fn bdi_theta_integrand(z: C64, v: C64, w: C64, n: usize, ctx: &ModularContext) -> Result<C64> {
    Ok(kernel_k(v, z.conj(), n, ctx) * kernel_k(z, w.conj(), n, ctx) * weight_m(z, z.conj(), n, ctx)?)
}

/// Residuals of the equivalence between the torus and annulus forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdiCheck {
    /// `rho(z) = gamma integrand * |dZ/dz|^2 / |Z|^4 / theta integrand`, which
    /// must not depend on `z`: relative difference to `rho` at a reference point
    pub integrand: f64,
    /// relative difference of the gamma right-hand side and `rho(z) C K(v, conj w)`
    pub rhs: f64,
    pub rho: C64,
}

fn exp2pi(x: C64) -> C64 {
    (2.0 * PI * I * x).exp()
}

fn density_ratio(z: C64, v: C64, w: C64, n: usize, ctx: &ModularContext) -> Result<C64> {
    let zz = exp2pi(z);
    let (vv, wb) = (exp2pi(v), exp2pi(w.conj()));
    let gamma_side = bdi_gamma_integrand(zz, zz.conj(), vv, wb, n, ctx)? * 4.0 * PI * PI / zz.norm_sqr();
    Ok(gamma_side / bdi_theta_integrand(z, v, w, n, ctx)?)
}

fn with_retry<T>(mut z: C64, f: impl Fn(C64) -> Result<T>) -> Result<T> {
    for _ in 0..3 {
        match f(z) {
            Err(Error::PoleHit { .. }) => z += C64::new(1e-6, 1e-6),
            r => return r,
        }
    }
    f(z)
}

/// Compare the two forms at torus point `z` for kernel points `v`, `w`
/// (`Z = e^{2 pi i z}`, conjugate coordinate `conj Z`, `V = e^{2 pi i v}`,
/// `W = e^{2 pi i conj w}`). Pole hits are retried at perturbed points.
pub fn bdi_integrand_equiv(z: C64, v: C64, w: C64, n: usize, ctx: &ModularContext) -> Result<BdiCheck> {
    require_imaginary(ctx)?;
    let rho = with_retry(z, |z| density_ratio(z, v, w, n, ctx))?;
    let z_ref = C64::new(0.37, 0.41 * ctx.tau_im());
    let rho_ref = with_retry(z_ref, |z| density_ratio(z, v, w, n, ctx))?;
    let rhs = bdi_rhs(exp2pi(v), exp2pi(w.conj()), n, ctx)?;
    let theta_rhs = constant_c(n, ctx)? * kernel_k(v, w.conj(), n, ctx);
    Ok(BdiCheck { integrand: rel_diff(rho, rho_ref), rhs: rel_diff(rhs, rho * theta_rhs), rho })
}

/// At `N = 0` the kernel is identically 1 and the torus integral reduces to
/// `e^{-4 pi i eta} iint theta(2u) theta(2 conj u) / theta(u +- conj u +- gamma)`
/// with `gamma = eta + 1/2 + tau/2`. Returns the larger of the pointwise
/// integrand mismatch at `z` and the mismatch of `C` with the closed form.
pub fn bdi_order_zero_residual(z: C64, ctx: &ModularContext) -> Result<f64> {
    let gamma = ctx.eta() + 0.5 + ctx.tau() / 2.0;
    let phase = (-4.0 * PI * I * ctx.eta()).exp();
    let (u, ub) = (z, z.conj());
    let reduced = phase * ctx.th(2.0 * u) * ctx.th(2.0 * ub)
        / ctx.th_prod([u + ub + gamma, u + ub - gamma, u - ub + gamma, u - ub - gamma]);
    let pointwise = rel_diff(bdi_theta_integrand(z, z, z, 0, ctx)?, reduced);
    let constant = rel_diff(constant_c(0, ctx)?, phase * fil_closed(gamma, ctx));
    Ok(pointwise.max(constant))
}
