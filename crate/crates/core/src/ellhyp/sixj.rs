//! Elliptic 6j-symbols: the change-of-basis coefficients between two product
//! bases of `Theta_N`, their scalar-product representation and self-duality.

use std::fmt::Write as _;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identities::rel_diff;
use crate::linalg::{self, CMatrix};
use crate::metric::{biorthogonal_params, constant_c, MetricContext};
use crate::space::{fekete_nodes, sigma, solve_nodes, BasisParams, MAX_CONDITION};
use crate::theta::{EtaKind, ModularContext, C64, I};

const HOLDOUT_NODES: usize = 3;
const NODE_SEED: u64 = 0x6a;
const RESEEDS: u64 = 4;

/// `R` with `e_k^N(x; a, b) = sum_l R[k][l] e_l^N(x; c, d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SixJTable {
    pub n: usize,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    /// rows `k`, columns `l`
    pub r: Vec<Vec<C64>>,
    /// equilibrated condition number of the evaluation matrix of `(e_l(x; c, d))`
    pub cond: f64,
    /// largest relative reconstruction error at held-out nodes
    pub holdout_residual: f64,
}

impl SixJTable {
    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.r[k][l]
    }

    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.n + 1, self.n + 1, |k, l| self.r[k][l])
    }

    /// Rows `k,l,re,im`, one per entry, in row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,l,re,im\n");
        for (k, row) in self.r.iter().enumerate() {
            for (l, z) in row.iter().enumerate() {
                let _ = writeln!(out, "{k},{l},{:?},{:?}", z.re, z.im);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("bad table json: {e}")))
    }
}

fn check_basis(bp: &BasisParams, which: &str) -> Result<()> {
    if !bp.valid() {
        return Err(Error::InvalidBasis(format!("({which}) = ({}, {}) does not give a basis", bp.a, bp.b)));
    }
    Ok(())
}

/// Solve for `R` from evaluations at `N+1` generic nodes, using the best
/// conditioned of five seeded node sets (error if its equilibrated condition
/// exceeds `1e8`), and validate at three held-out nodes.
pub fn sixj_solve(a: C64, b: C64, c: C64, d: C64, n: usize, ctx: &ModularContext) -> Result<SixJTable> {
    let from = BasisParams::new(n, a, b, *ctx);
    let to = BasisParams::new(n, c, d, *ctx);
    check_basis(&from, "a, b")?;
    check_basis(&to, "c, d")?;
    let (fit, lhs, _) = (0..=RESEEDS)
        .map(|attempt| {
            let nodes = fekete_nodes(&to, NODE_SEED + attempt * 7919);
            let lhs = to.evaluation_matrix(&nodes);
            let cond = linalg::equilibrated_condition(&lhs);
            (nodes, lhs, cond)
        })
        .min_by(|x, y| x.2.total_cmp(&y.2))
        .expect("at least one node set");
    let hold = solve_nodes(HOLDOUT_NODES, n, NODE_SEED ^ 0xff, ctx);
    let rhs = from.evaluation_matrix(&fit);
    let (rt, cond) = linalg::solve(&lhs, &rhs, MAX_CONDITION)?;
    let r: Vec<Vec<C64>> = (0..=n).map(|k| (0..=n).map(|l| rt[(l, k)]).collect()).collect();
    let mut worst = 0.0_f64;
    for &x in &hold {
        for (k, row) in r.iter().enumerate() {
            let rebuilt: C64 = row.iter().enumerate().map(|(l, &rkl)| rkl * to.e(l, x)).sum();
            worst = worst.max(rel_diff(from.e(k, x), rebuilt));
        }
    }
    Ok(SixJTable { n, a, b, c, d, r, cond, holdout_residual: worst })
}

fn nonzero_eta(ctx: &ModularContext) -> Result<C64> {
    if ctx.eta_kind() == EtaKind::Zero {
        return Err(Error::EtaZero);
    }
    Ok(ctx.eta())
}

fn nonzero(v: C64, what: &str) -> Result<C64> {
    if !(v.norm() > 1e-300) {
        return Err(Error::DegenerateParams(format!("{what} vanishes")));
    }
    Ok(v)
}

/// `[x + 2j] / [x] [-N, x]_j / [1, x + N + 1]_j`.
fn column_factor(x: C64, j: usize, n: usize, ctx: &ModularContext) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    let num = ctx.br(x + 2.0 * j as f64) * ctx.br_fact(C64::new(-(n as f64), 0.0), j) * ctx.br_fact(x, j);
    let den = nonzero(ctx.br(x), "[lambda]")? * nonzero(ctx.br_fact(one, j) * ctx.br_fact(x + n as f64 + 1.0, j), "[1, lambda + N + 1]_l")?;
    Ok(num / den)
}

/// `[x + 1, s]_N` for the normalizing factor.
fn norm_factor(x: C64, s: C64, n: usize, ctx: &ModularContext) -> Result<C64> {
    nonzero(ctx.br_fact(x + 1.0, n) * ctx.br_fact(s, n), "[lambda + 1, (c + d)/2 eta]_N")
}

/// `R[k][l]` from the metric: `C^{-1} e^{pi i N (1 - tau)/2} / [lambda + 1, (c+d)/2eta]_N
/// [lambda + 2l]/[lambda] [-N, lambda]_l / [1, lambda + N + 1]_l
/// <e_k(.; a, b), sigma e_l(.; eta(1-N) -+ conj d, eta(1-N) -+ conj c)>`,
/// `lambda = (c - d - 2 N eta)/2 eta`.
pub fn sixj_scalar_product(table: &SixJTable, k: usize, l: usize, mc: &MetricContext) -> Result<C64> {
    let n = table.n;
    if mc.n != n {
        return Err(Error::OrderMismatch { expected: n, found: mc.n });
    }
    if k > n || l > n {
        return Err(Error::IndexOutOfRange { k: k.max(l), n });
    }
    let ctx = &mc.ctx;
    let eta = nonzero_eta(ctx)?;
    let nf = n as f64;
    let half = 0.5 * nf * eta;
    let (_, fp) = biorthogonal_params(table.c + half, table.d + half, n, ctx);
    let lambda = (table.c - table.d - 2.0 * nf * eta) / (2.0 * eta);
    let s = (table.c + table.d) / (2.0 * eta);
    let pref = (PI * I * nf * (1.0 - ctx.tau()) / 2.0).exp() / constant_c(n, ctx)? / norm_factor(lambda, s, n, ctx)?
        * column_factor(lambda, l, n, ctx)?;
    let e = BasisParams::new(n, table.a, table.b, *ctx).basis_fn(k)?;
    let f = sigma(&fp.basis_fn(l)?, ctx);
    Ok(pref * mc.inner(&e, &f)?)
}

/// `|R[k][l] - scalar-product formula|`, relative.
pub fn sixj_scalar_product_residual(table: &SixJTable, k: usize, l: usize, mc: &MetricContext) -> Result<f64> {
    Ok(rel_diff(table.get(k, l), sixj_scalar_product(table, k, l, mc)?))
}

/// Parameters `(eta(1-N) - d, eta(1-N) - c, eta(1-N) - b, eta(1-N) - a)` of the dual table.
pub fn dual_params(a: C64, b: C64, c: C64, d: C64, n: usize, ctx: &ModularContext) -> [C64; 4] {
    let m = ctx.eta() * (1.0 - n as f64);
    [m - d, m - c, m - b, m - a]
}

/// Max over `(k, l)` of the relative difference between `R[k][l](a, b, c, d)`
/// and the bracket prefactor times `R[l][k]` of the dual parameters, with
/// `lambda = (c - d - 2N eta)/2 eta` and `mu = (a - b - 2N eta)/2 eta`.
pub fn sixj_duality_residual(a: C64, b: C64, c: C64, d: C64, n: usize, ctx: &ModularContext) -> Result<f64> {
    let eta = nonzero_eta(ctx)?;
    let nf = n as f64;
    let lambda = (c - d - 2.0 * nf * eta) / (2.0 * eta);
    let mu = (a - b - 2.0 * nf * eta) / (2.0 * eta);
    let ratio = norm_factor(mu, (a + b) / (2.0 * eta), n, ctx)? / norm_factor(lambda, (c + d) / (2.0 * eta), n, ctx)?;
    let direct = sixj_solve(a, b, c, d, n, ctx)?;
    let [a2, b2, c2, d2] = dual_params(a, b, c, d, n, ctx);
    let dual = sixj_solve(a2, b2, c2, d2, n, ctx)?;
    let mut worst = 0.0_f64;
    for k in 0..=n {
        let row = column_factor(mu, k, n, ctx)?;
        for l in 0..=n {
            let pref = ratio * column_factor(lambda, l, n, ctx)? / row;
            worst = worst.max(rel_diff(direct.get(k, l), pref * dual.get(l, k)));
        }
    }
    Ok(worst)
}
