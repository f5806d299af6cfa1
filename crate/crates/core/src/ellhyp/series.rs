//! The terminating balanced sum of Frenkel and Turaev and the kernel
//! expansion it encodes.

use crate::error::{Error, Result};
use crate::identities::rel_diff;
use crate::sampling::Sampler;
use crate::metric::{biorthogonal_params, dual_basis, gamma_k};
use crate::space::kernel_k;
use crate::theta::{EtaKind, ModularContext, C64};

/// Balanced parameters `b + c + d + e = 2a + N + 1` of the sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FTParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub e: C64,
    pub n: usize,
}

impl FTParams {
    /// Solve the balancing condition for `e`.
    pub fn new(a: C64, b: C64, c: C64, d: C64, n: usize) -> Self {
        let e = 2.0 * a + n as f64 + 1.0 - b - c - d;
        FTParams { a, b, c, d, e, n }
    }

    /// The parameters obtained by writing out `K(u, conj v)` in the
    /// biorthogonal pair built from `(a1, a2)`.
    pub fn from_kernel(a1: C64, a2: C64, u: C64, v: C64, n: usize, ctx: &ModularContext) -> Result<Self> {
        let eta = nonzero_eta(ctx)?;
        let nf = n as f64;
        let h = 0.5 + ctx.tau() / 2.0;
        let s = -a2 - 0.5 * nf * eta + eta;
        let t = a1 - 0.5 * nf * eta;
        let k = 1.0 / (2.0 * eta);
        let a = k * (a1 - a2 - 2.0 * nf * eta);
        let b = k * (s + v.conj() + h);
        let c = k * (s - v.conj() - h);
        let d = k * (t + u);
        Ok(FTParams::new(a, b, c, d, n))
    }

    pub fn balancing_defect(&self) -> f64 {
        (self.b + self.c + self.d + self.e - (2.0 * self.a + self.n as f64 + 1.0)).norm()
    }
}

fn nonzero_eta(ctx: &ModularContext) -> Result<C64> {
    if ctx.eta_kind() == EtaKind::Zero {
        return Err(Error::EtaZero);
    }
    Ok(ctx.eta())
}

fn fact(xs: &[C64], k: usize, ctx: &ModularContext) -> C64 {
    xs.iter().map(|&x| ctx.br_fact(x, k)).product()
}

fn nonzero(v: C64, scale: C64, what: &str) -> Result<C64> {
    if !(v.norm() > 1e-14 * scale.norm().max(1e-300)) {
        return Err(Error::DegenerateParams(format!("{what} vanishes")));
    }
    Ok(v)
}

/// Terms `([a+2k]/[a]) [a, b, c, d, e, -N]_k / [1, a+1-b, a+1-c, a+1-d, a+1-e, a+1+N]_k`, `k = 0..=N`.
pub fn ft_terms(ft: &FTParams, ctx: &ModularContext) -> Result<Vec<C64>> {
    nonzero_eta(ctx)?;
    let FTParams { a, b, c, d, e, n } = *ft;
    let one = C64::new(1.0, 0.0);
    let ba = nonzero(ctx.br(a), ctx.br(a + 0.5), "[a]")?;
    let num = [a, b, c, d, e, C64::new(-(n as f64), 0.0)];
    let den = [one, a + 1.0 - b, a + 1.0 - c, a + 1.0 - d, a + 1.0 - e, a + 1.0 + n as f64];
    let zero_scale = ctx.br(a + 0.5).norm().max(1.0);
    (0..=n)
        .map(|k| {
            let dk = fact(&den, k, ctx);
            if dk.norm() < 1e-300 || den.iter().any(|&x| (0..k).any(|j| ctx.br(x + j as f64).norm() < 1e-13 * zero_scale)) {
                return Err(Error::DegenerateParams(format!("denominator bracket vanishes at k = {k}")));
            }
            Ok(ctx.br(a + 2.0 * k as f64) / ba * fact(&num, k, ctx) / dk)
        })
        .collect()
}

/// Both sides of the summation and their normalized difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FTResult {
    pub lhs: C64,
    pub rhs: C64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|)`
    pub residual: f64,
    /// `sum_k |t_k| / |lhs|`; the residual cannot drop below about `eps * condition`
    pub condition: f64,
    /// `|lhs - rhs| / sum_k |t_k|`
    pub termwise: f64,
}

/// `sum_k terms = [a+1, a+1-b-c, a+1-b-d, a+1-c-d]_N / [a+1-b, a+1-c, a+1-d, a+1-b-c-d]_N`.
pub fn frenkel_turaev(ft: &FTParams, ctx: &ModularContext) -> Result<FTResult> {
    let terms = ft_terms(ft, ctx)?;
    let lhs: C64 = terms.iter().sum();
    let mass: f64 = terms.iter().map(|t| t.norm()).sum();
    let FTParams { a, b, c, d, n, .. } = *ft;
    let a1 = a + 1.0;
    let num = fact(&[a1, a1 - b - c, a1 - b - d, a1 - c - d], n, ctx);
    let den = fact(&[a1 - b, a1 - c, a1 - d, a1 - b - c - d], n, ctx);
    if den.norm() < 1e-300 {
        return Err(Error::DegenerateParams("right-hand denominator vanishes".into()));
    }
    let rhs = num / den;
    Ok(FTResult {
        lhs,
        rhs,
        residual: rel_diff(lhs, rhs),
        condition: mass / lhs.norm(),
        termwise: (lhs - rhs).norm() / mass,
    })
}

/// Draw balanced parameters with `a, b, c, d` in `[-1.5, 1.5] x [-0.5, 0.5]`,
/// redrawing until the termwise condition is at most `max_condition`.
pub fn sample_balanced(s: &mut Sampler, n: usize, max_condition: f64, ctx: &ModularContext) -> Result<FTParams> {
    for _ in 0..MAX_DRAWS {
        let mut z = || C64::new(s.uniform(-1.5, 1.5), s.uniform(-0.5, 0.5));
        let ft = FTParams::new(z(), z(), z(), z(), n);
        match frenkel_turaev(&ft, ctx) {
            Ok(r) if r.condition <= max_condition => return Ok(ft),
            Ok(_) | Err(Error::DegenerateParams(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateParams(format!("no draw with condition <= {max_condition:e} in {MAX_DRAWS} tries")))
}

const MAX_DRAWS: usize = 1000;

/// Basis parameters `(1/4 + tau/4, -1/4 + tau/8)` for which the kernel
/// expansion is well conditioned near the diagonal in both regimes.
pub fn kernel_basis_params(ctx: &ModularContext) -> (C64, C64) {
    let t = ctx.tau();
    (0.25 + t / 4.0, -0.25 + t / 8.0)
}

/// Terms `e_k(u) conj(f_k(v)) / Gamma_k` of the kernel expansion.
pub fn kernel_expansion_terms(a1: C64, a2: C64, u: C64, v: C64, n: usize, ctx: &ModularContext) -> Result<Vec<C64>> {
    let (ep, _) = biorthogonal_params(a1, a2, n, ctx);
    let fs = dual_basis(a1, a2, n, ctx)?;
    (0..=n)
        .map(|k| Ok(ep.e(k, u) * fs[k].eval(v).conj() / gamma_k(a1, a2, k, n, ctx)?))
        .collect()
}

/// `|K(u, conj v) - sum_k e_k(u) conj(f_k(v)) / Gamma_k|`, relative.
pub fn kernel_expansion_residual(a1: C64, a2: C64, u: C64, v: C64, n: usize, ctx: &ModularContext) -> Result<f64> {
    let sum: C64 = kernel_expansion_terms(a1, a2, u, v, n, ctx)?.iter().sum();
    Ok(rel_diff(sum, kernel_k(u, v.conj(), n, ctx)))
}

/// Tie between the sum and the kernel expansion at the substituted
/// parameters: the maximum over `k` of the relative difference of the term
/// ratios `t_k / t_0`, and of `K(u, conj v) / (e_0(u) conj(f_0(v)) / Gamma_0)`
/// against the closed product.
pub fn kernel_tie_residual(a1: C64, a2: C64, u: C64, v: C64, n: usize, ctx: &ModularContext) -> Result<f64> {
    let ft = FTParams::from_kernel(a1, a2, u, v, n, ctx)?;
    let t = ft_terms(&ft, ctx)?;
    let kt = kernel_expansion_terms(a1, a2, u, v, n, ctx)?;
    let mut worst = rel_diff(kernel_k(u, v.conj(), n, ctx) / kt[0], frenkel_turaev(&ft, ctx)?.rhs);
    for k in 1..=n {
        worst = worst.max(rel_diff(t[k] / t[0], kt[k] / kt[0]));
    }
    Ok(worst)
}
