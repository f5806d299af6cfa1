//! The space of even theta functions of order 2N, its product bases, the
//! half-period involution and the kernel functions.
//!
//! Elements are evaluator handles ([`ThetaFn`]): every operator in this crate
//! acts by shifted evaluation, so a closure is the natural representation.
//! Coefficients with respect to a basis are recovered by linear solves at
//! generic nodes when needed.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::identities::normalized;
use crate::linalg::{self, CMatrix};
use crate::sampling::Sampler;
use crate::theta::{EtaKind, ModularContext, C64, I};

/// Condition number above which a node set is rejected.
pub const MAX_CONDITION: f64 = 1e8;

/// Minimal lattice distance for the basis criterion.
pub const LATTICE_TOL: f64 = 1e-6;

/// A function in `Theta_N`, tagged with its order `N`.
#[derive(Clone)]
pub struct ThetaFn {
    order: usize,
    eval: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
}

impl ThetaFn {
    pub fn new<F>(order: usize, f: F) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        ThetaFn { order, eval: Arc::new(f) }
    }

    pub fn constant(order: usize, value: C64) -> Self {
        ThetaFn::new(order, move |_| value)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eval(&self, x: C64) -> C64 {
        (self.eval)(x)
    }

    pub fn scaled(&self, c: C64) -> ThetaFn {
        let f = self.clone();
        ThetaFn::new(self.order, move |x| c * f.eval(x))
    }

    /// `self - other`, both of the same order.
    pub fn minus(&self, other: &ThetaFn) -> Result<ThetaFn> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { expected: self.order, found: other.order });
        }
        let (f, g) = (self.clone(), other.clone());
        Ok(ThetaFn::new(self.order, move |x| f.eval(x) - g.eval(x)))
    }
}

impl fmt::Debug for ThetaFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ThetaFn").field("order", &self.order).finish_non_exhaustive()
    }
}

/// Parameters `(N, a, b)` of the product basis `e_k^N(x; a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisParams {
    pub n: usize,
    pub a: C64,
    pub b: C64,
    pub ctx: ModularContext,
}

impl BasisParams {
    pub fn new(n: usize, a: C64, b: C64, ctx: ModularContext) -> Self {
        BasisParams { n, a, b, ctx }
    }

    /// Unchecked evaluation of `e_k`; `k` must not exceed `n`.
    pub fn e(&self, k: usize, x: C64) -> C64 {
        let eta2 = 2.0 * self.ctx.eta();
        let mut v = C64::new(1.0, 0.0);
        for j in 0..k {
            v *= self.ctx.th_pm(self.a + eta2 * j as f64, x);
        }
        for j in 0..self.n - k {
            v *= self.ctx.th_pm(self.b + eta2 * j as f64, x);
        }
        v
    }

    pub fn basis_fn(&self, k: usize) -> Result<ThetaFn> {
        if k > self.n {
            return Err(Error::IndexOutOfRange { k, n: self.n });
        }
        let bp = *self;
        Ok(ThetaFn::new(self.n, move |x| bp.e(k, x)))
    }

    pub fn basis(&self) -> Vec<ThetaFn> {
        (0..=self.n).map(|k| self.basis_fn(k).expect("k <= n")).collect()
    }

    pub fn valid(&self) -> bool {
        basis_valid(self)
    }

    /// `(N+1) x (N+1)` matrix `M[i][l] = e_l(x_i)`.
    pub fn evaluation_matrix(&self, nodes: &[C64]) -> CMatrix {
        CMatrix::from_fn(nodes.len(), self.n + 1, |i, l| self.e(l, nodes[i]))
    }
}

/// `e_k^N(x; a, b) = prod_{j<k} theta(a +- x + 2 j eta) prod_{j<N-k} theta(b +- x + 2 j eta)`.
pub fn e_basis(k: usize, x: C64, bp: &BasisParams) -> Result<C64> {
    if k > bp.n {
        return Err(Error::IndexOutOfRange { k, n: bp.n });
    }
    Ok(bp.e(k, x))
}

/// The lattice-avoidance criterion for `(e_k)` to be a basis.
pub fn basis_valid(bp: &BasisParams) -> bool {
    let ctx = &bp.ctx;
    let eta2 = 2.0 * ctx.eta();
    let n = bp.n as i64;
    let diff_ok = (1 - n..n).all(|j| ctx.lattice_distance(bp.a - bp.b + eta2 * j as f64) >= LATTICE_TOL);
    let sum_ok = (0..n).all(|j| ctx.lattice_distance(bp.a + bp.b + eta2 * j as f64) >= LATTICE_TOL);
    diff_ok && sum_ok
}

/// Generic solve nodes `x_j = x0 + j delta`, `delta = 0.37 (1 + tau) / (N + 3)`.
pub fn solve_nodes(count: usize, n: usize, seed: u64, ctx: &ModularContext) -> Vec<C64> {
    let mut s = Sampler::new(seed);
    let x0 = s.cell_point(ctx) * 0.5;
    let delta = 0.37 * (1.0 + ctx.tau()) / (n as f64 + 3.0);
    (0..count).map(|j| x0 + delta * j as f64).collect()
}

/// Equilibrated condition number of the basis evaluation matrix at seeded nodes.
pub fn evaluation_condition(bp: &BasisParams, seed: u64) -> f64 {
    let nodes = solve_nodes(bp.n + 1, bp.n, seed, &bp.ctx);
    linalg::equilibrated_condition(&bp.evaluation_matrix(&nodes))
}

/// `N+1` interpolation nodes for the basis `bp`, chosen greedily by volume
/// (approximate Fekete points) among `30 (N+1)` seeded candidates in the half
/// cell `[0, 1/2] x [0, Im tau]`. Rows and columns of the candidate evaluation
/// matrix are normalized before selection.
pub fn fekete_nodes(bp: &BasisParams, seed: u64) -> Vec<C64> {
    let n1 = bp.n + 1;
    let t = bp.ctx.tau_im();
    let mut s = Sampler::new(seed);
    let cands: Vec<C64> = (0..30 * n1).map(|_| C64::new(s.uniform(0.01, 0.49), s.uniform(0.01, 0.99) * t)).collect();
    let mut m = bp.evaluation_matrix(&cands);
    for j in 0..n1 {
        let c = m.column(j).norm();
        if c > 0.0 {
            m.column_mut(j).unscale_mut(c);
        }
    }
    for i in 0..m.nrows() {
        let r = m.row(i).norm();
        if r > 0.0 {
            m.row_mut(i).unscale_mut(r);
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(n1);
    for _ in 0..n1 {
        let best = (0..m.nrows())
            .filter(|i| !chosen.contains(i))
            .max_by(|&a, &b| m.row(a).norm_squared().total_cmp(&m.row(b).norm_squared()))
            .expect("enough candidates");
        chosen.push(best);
        let q = m.row(best).clone_owned();
        let qn = q.norm();
        if qn == 0.0 {
            break;
        }
        let q = q.unscale(qn);
        for i in 0..m.nrows() {
            let d: C64 = (0..n1).map(|j| m[(i, j)] * q[j].conj()).sum();
            for j in 0..n1 {
                m[(i, j)] -= d * q[j];
            }
        }
    }
    chosen.iter().map(|&i| cands[i]).collect()
}

/// Coordinates of `f` in the basis `bp`, recovered by a solve at `N+1`
/// approximate Fekete nodes; the best conditioned (after equilibration) of
/// five seeded node sets is used, and all five above the condition cap is an error.
pub fn coefficients(f: &ThetaFn, bp: &BasisParams, seed: u64) -> Result<(Vec<C64>, f64)> {
    if f.order() != bp.n {
        return Err(Error::OrderMismatch { expected: bp.n, found: f.order() });
    }
    let (nodes, a, cond) = (0..5u64)
        .map(|attempt| {
            let nodes = fekete_nodes(bp, seed.wrapping_add(attempt * 7919));
            let a = bp.evaluation_matrix(&nodes);
            let cond = linalg::equilibrated_condition(&a);
            (nodes, a, cond)
        })
        .min_by(|x, y| x.2.total_cmp(&y.2))
        .expect("five candidates");
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition: cond });
    }
    let rhs = CMatrix::from_fn(nodes.len(), 1, |i, _| f.eval(nodes[i]));
    let (x, cond) = linalg::solve(&a, &rhs, MAX_CONDITION)?;
    Ok((x.iter().copied().collect(), cond))
}

/// Largest relative violation of the three defining relations of `Theta_N`
/// over `n_samples` seeded points.
pub fn membership_residual(f: &ThetaFn, ctx: &ModularContext, n_samples: usize, seed: u64) -> f64 {
    let mut s = Sampler::new(seed);
    let tau = ctx.tau();
    let nf = f.order() as f64;
    let mut worst = 0.0_f64;
    for _ in 0..n_samples {
        let x = s.cell_point(ctx);
        let fx = f.eval(x);
        let period = normalized([f.eval(x + 1.0), -fx]);
        let quasi = normalized([f.eval(x + tau), -(-2.0 * PI * I * nf * (2.0 * x + tau)).exp() * fx]);
        let parity = normalized([f.eval(-x), -fx]);
        worst = worst.max(period).max(quasi).max(parity);
    }
    worst
}

/// `(sigma f)(x) = e^{2 pi i N (1/4 + tau/4 + x)} f(x + 1/2 + tau/2)`.
pub fn sigma(f: &ThetaFn, ctx: &ModularContext) -> ThetaFn {
    let g = f.clone();
    let h = 0.5 + ctx.tau() / 2.0;
    let quarter = 0.25 + ctx.tau() / 4.0;
    let nf = f.order() as f64;
    ThetaFn::new(f.order(), move |x| (2.0 * PI * I * nf * (quarter + x)).exp() * g.eval(x + h))
}

/// The second displayed form `e^{2 pi i N (1/4 + tau/4 - x)} f(x - 1/2 - tau/2)`.
pub fn sigma_reflected(f: &ThetaFn, ctx: &ModularContext) -> ThetaFn {
    let g = f.clone();
    let h = 0.5 + ctx.tau() / 2.0;
    let quarter = 0.25 + ctx.tau() / 4.0;
    let nf = f.order() as f64;
    ThetaFn::new(f.order(), move |x| (2.0 * PI * I * nf * (quarter - x)).exp() * g.eval(x - h))
}

/// Closed form of `sigma e_k^N(x; a, b)`.
pub fn sigma_e_closed(k: usize, x: C64, bp: &BasisParams) -> C64 {
    let ctx = &bp.ctx;
    let (kf, nf) = (k as f64, bp.n as f64);
    let h = 0.5 + ctx.tau() / 2.0;
    let expo = bp.a * kf - bp.b * (nf - kf) + (nf - 1.0) * (2.0 * kf - nf) * ctx.eta()
        + 0.25 * nf * (ctx.tau() - 1.0);
    let shifted = BasisParams::new(bp.n, bp.a + h, bp.b - h, *ctx);
    (2.0 * PI * I * expo).exp() * shifted.e(k, x)
}

/// `K(u, w) = e^{2 pi i u N} prod_{k<N} theta(u +- w + (2k - N + 1) eta + 1/2 + tau/2)`,
/// where `w` plays the role of `conj(v)`.
pub fn kernel_k(u: C64, w: C64, n: usize, ctx: &ModularContext) -> C64 {
    let nf = n as f64;
    let h = 0.5 + ctx.tau() / 2.0;
    let mut v = (2.0 * PI * I * u * nf).exp();
    for k in 0..n {
        let shift = (2.0 * k as f64 - nf + 1.0) * ctx.eta() + h;
        v *= ctx.th(u + w + shift) * ctx.th(u - w + shift);
    }
    v
}

/// `x -> K(x, w)`, the kernel function `K_v` with `w = conj(v)`.
pub fn kernel_fn(w: C64, n: usize, ctx: &ModularContext) -> ThetaFn {
    let c = *ctx;
    ThetaFn::new(n, move |x| kernel_k(x, w, n, &c))
}

/// Residuals of the parameter laws of `e_k^N(x; a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftResiduals {
    /// `a -> a + 1` invariance
    pub period: f64,
    /// `a -> a + tau` prefactor law
    pub quasi_period: f64,
    /// conjugation law, sign per eta regime
    pub conjugation: f64,
}

impl ShiftResiduals {
    pub fn max(&self) -> f64 {
        self.period.max(self.quasi_period).max(self.conjugation)
    }
}

pub fn basis_param_shifts(k: usize, x: C64, bp: &BasisParams) -> Result<ShiftResiduals> {
    let e0 = e_basis(k, x, bp)?;
    let ctx = &bp.ctx;
    let tau = ctx.tau();
    let kf = k as f64;
    let a1 = BasisParams { a: bp.a + 1.0, ..*bp };
    let at = BasisParams { a: bp.a + tau, ..*bp };
    let pref = (-2.0 * PI * I * kf * (tau + 2.0 * bp.a + 2.0 * (kf - 1.0) * ctx.eta())).exp();
    let sign = match ctx.eta_kind() {
        EtaKind::Imaginary => -1.0,
        _ => 1.0,
    };
    let conj = BasisParams { a: sign * bp.a.conj(), b: sign * bp.b.conj(), ..*bp };
    Ok(ShiftResiduals {
        period: normalized([a1.e(k, x), -e0]),
        quasi_period: normalized([at.e(k, x), -pref * e0]),
        conjugation: normalized([e0.conj(), -conj.e(k, x.conj())]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ModularContext {
        ModularContext::new(0.25, C64::new(0.05, 0.0)).unwrap()
    }

    fn bp(n: usize) -> BasisParams {
        BasisParams::new(n, C64::new(0.13, 0.031), C64::new(0.27, -0.018), ctx())
    }

    #[test]
    fn order_zero_basis_is_one() {
        let b = bp(0);
        assert_eq!(e_basis(0, C64::new(0.3, 0.1), &b).unwrap(), C64::new(1.0, 0.0));
        assert!(matches!(e_basis(1, C64::new(0.3, 0.1), &b), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn swap_symmetry_and_parity() {
        let b = bp(3);
        let swapped = BasisParams::new(3, b.b, b.a, b.ctx);
        let x = C64::new(0.41, 0.07);
        for k in 0..=3 {
            assert!(normalized([b.e(k, x), -swapped.e(3 - k, x)]) < 1e-15);
            assert!(normalized([b.e(k, -x), -b.e(k, x)]) < 1e-13);
        }
    }

    #[test]
    fn basis_criterion() {
        let c = ctx();
        let eta = c.eta();
        assert!(!BasisParams::new(2, C64::new(0.1, 0.02) + 2.0 * eta, C64::new(0.1, 0.02), c).valid());
        assert!(!BasisParams::new(2, C64::new(0.1, 0.02), C64::new(-0.1, -0.02), c).valid());
        let mut s = Sampler::new(3);
        let g = BasisParams::new(3, s.cell_point(&c), s.cell_point(&c), c);
        assert!(g.valid());
        assert!(evaluation_condition(&g, 11) < MAX_CONDITION);
    }

    #[test]
    fn membership() {
        let c = ctx();
        let b = bp(3);
        for k in 0..=3 {
            assert!(membership_residual(&b.basis_fn(k).unwrap(), &c, 10, 1) <= 1e-10);
        }
        let c2 = c;
        let sq = ThetaFn::new(1, move |x| c2.th(x) * c2.th(x));
        assert!(membership_residual(&sq, &c, 10, 2) <= 1e-10);
        let odd = ThetaFn::new(1, move |x| c2.th(x));
        assert!(membership_residual(&odd, &c, 10, 2) > 0.5);
    }

    #[test]
    fn sigma_involution_and_closed_form() {
        let c = ctx();
        let b = bp(3);
        let x = C64::new(0.22, 0.04);
        for k in 0..=3 {
            let f = b.basis_fn(k).unwrap();
            let ss = sigma(&sigma(&f, &c), &c);
            assert!(normalized([ss.eval(x), -f.eval(x)]) <= 1e-11);
            assert!(normalized([sigma(&f, &c).eval(x), -sigma_reflected(&f, &c).eval(x)]) <= 1e-11);
            assert!(normalized([sigma(&f, &c).eval(x), -sigma_e_closed(k, x, &b)]) <= 1e-11);
            assert!(membership_residual(&sigma(&f, &c), &c, 5, 9) <= 1e-9);
        }
        let one = ThetaFn::constant(0, C64::new(1.0, 0.0));
        assert!((sigma(&one, &c).eval(x) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn kernel_symmetries() {
        let c = ctx();
        let (u, w) = (C64::new(0.31, 0.05), C64::new(0.62, 0.13));
        for n in 0..4 {
            assert!(normalized([kernel_k(u, w, n, &c), -kernel_k(w, u, n, &c)]) <= 1e-12);
            let v = w;
            assert!(
                normalized([kernel_k(v, u.conj(), n, &c).conj(), -kernel_k(u, v.conj(), n, &c)]) <= 1e-12
            );
            assert!(membership_residual(&kernel_fn(w, n, &c), &c, 5, 4) <= 1e-10);
        }
        assert_eq!(kernel_k(u, w, 0, &c), C64::new(1.0, 0.0));
    }

    #[test]
    fn parameter_shift_laws() {
        let mut s = Sampler::new(21);
        for eta in [C64::new(0.05, 0.0), C64::new(0.0, 0.01)] {
            let c = ctx().with_eta(eta).unwrap();
            for _ in 0..3 {
                let b = BasisParams::new(3, s.cell_point(&c), s.cell_point(&c), c);
                let x = s.cell_point(&c);
                for k in 0..=3 {
                    assert!(basis_param_shifts(k, x, &b).unwrap().max() <= 1e-10);
                }
            }
        }
        let b = bp(2);
        assert_eq!(basis_param_shifts(0, C64::new(0.3, 0.1), &b).unwrap().period, 0.0);
    }

    #[test]
    fn kernels_span_the_space() {
        let c = ctx();
        let n = 3;
        let nodes = solve_nodes(n + 1, n, 5, &c);
        let ws: Vec<C64> = solve_nodes(n + 1, n, 77, &c);
        let m = CMatrix::from_fn(n + 1, n + 1, |i, j| kernel_k(nodes[i], ws[j], n, &c));
        assert!(linalg::condition_number(&m) < MAX_CONDITION);
    }
}
