//! Batch verification: run identity suites for one parameter configuration and
//! emit a report of residuals against tolerances.
//!
//! Every case draws its inputs from a sampler seeded by the configured seed and
//! the case key, so a suite run on its own reproduces the values it has inside
//! a full run, and two runs with the same configuration give byte-identical
//! output.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ellhyp::gamma::{
    bdi_integrand_equiv, bdi_order_zero_residual, gamma_reflection_residual, gamma_shift_residual,
};
use crate::ellhyp::series::{
    frenkel_turaev, kernel_basis_params, kernel_expansion_residual, kernel_tie_residual, sample_balanced, FTParams,
};
use crate::ellhyp::sixj::{sixj_duality_residual, sixj_scalar_product_residual, sixj_solve};
use crate::error::{Error, Result};
use crate::identities::{
    check_addition, check_duplication, check_jacobi, check_modular, check_pf, check_quasi_periodicity,
    check_series_product, normalized, rel_diff,
};
use crate::linalg::CMatrix;
use crate::metric::{
    adjoint_residual, fil_integral, gamma_recurrence_residual, gram_check, lemma_i_closed, lemma_integrals,
    lemma_j_closed, positivity_extended, reproducing_residual, s_selfadjoint_joint, trace_residual, MetricContext,
};
use crate::operators::{
    delta_from_s, four_term_residual, gev_residual, s_proportionality_joint, sigma_conjugation_residual,
    tridiag_coeffs, tridiag_locality, DeltaParams,
};
use crate::sampling::Sampler;
use crate::space::{
    basis_param_shifts, coefficients, kernel_fn, membership_residual, sigma, sigma_e_closed, BasisParams, ThetaFn,
};
use crate::theta::{
    in_metric_range, theta_prime, theta_prime_zero_closed, EtaKind, ModularContext, ParamRange, RangeKind, C64,
};

/// One family of identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theta,
    Space,
    Operators,
    Metric,
    Kernel,
    Biortho,
    Hypergeo,
    Sixj,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Theta,
        Suite::Space,
        Suite::Operators,
        Suite::Metric,
        Suite::Kernel,
        Suite::Biortho,
        Suite::Hypergeo,
        Suite::Sixj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theta => "theta",
            Suite::Space => "space",
            Suite::Operators => "operators",
            Suite::Metric => "metric",
            Suite::Kernel => "kernel",
            Suite::Biortho => "biortho",
            Suite::Hypergeo => "hypergeo",
            Suite::Sixj => "sixj",
        }
    }

    /// Parse a suite name; `all` expands to every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .find(|x| x.name() == s)
            .map(|&x| vec![x])
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}' (expected one of theta, space, operators, metric, kernel, biortho, hypergeo, sixj, all)")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Default tolerance of every case, keyed `suite.case`.
pub const TOLERANCES: &[(&str, f64)] = &[
    ("theta.addition", 1e-10),
    ("theta.duplication", 1e-10),
    ("theta.jacobi", 1e-10),
    ("theta.n_term_3", 1e-10),
    ("theta.n_term_4", 1e-10),
    ("theta.n_term_5", 1e-10),
    ("theta.n_term_6", 1e-10),
    ("theta.modular", 1e-10),
    ("theta.quasi_periodicity", 1e-10),
    ("theta.series_product", 1e-10),
    ("theta.prime_zero", 1e-12),
    ("space.membership", 1e-9),
    ("space.sigma_involution", 1e-10),
    ("space.sigma_closed_form", 1e-10),
    ("space.param_shifts", 1e-10),
    ("space.kernel_membership", 1e-9),
    ("space.coefficients", 1e-8),
    ("operators.eigenvalue", 1e-9),
    ("operators.tridiagonal", 1e-9),
    ("operators.locality", 1e-9),
    ("operators.sigma_conjugation", 1e-9),
    ("operators.s_proportionality", 1e-9),
    ("operators.delta_from_s", 1e-9),
    ("operators.four_term", 1e-10),
    ("metric.hermitian", 1e-15),
    ("metric.adjoint", 1e-7),
    ("metric.s_selfadjoint", 1e-7),
    ("metric.doubling", 1e-8),
    ("metric.lemma_i", 1e-8),
    ("metric.lemma_j", 1e-8),
    ("metric.lemma_2d", 1e-6),
    ("kernel.trace", 1e-6),
    ("kernel.reproducing", 1e-6),
    ("kernel.expansion", 1e-8),
    ("biortho.gram_off_diagonal", 1e-8),
    ("biortho.gram_diagonal", 1e-6),
    ("biortho.gamma_recurrence", 1e-10),
    ("biortho.positivity", 1e-8),
    ("hypergeo.frenkel_turaev", 1e-10),
    ("hypergeo.frenkel_turaev_termwise", 1e-13),
    ("hypergeo.kernel_substitution", 1e-10),
    ("hypergeo.kernel_tie", 1e-8),
    ("hypergeo.gamma_reflection", 1e-10),
    ("hypergeo.gamma_shift", 1e-10),
    ("hypergeo.bdi_integrand", 1e-8),
    ("hypergeo.bdi_rhs", 1e-8),
    ("hypergeo.bdi_order_zero", 1e-10),
    ("sixj.identity", 1e-10),
    ("sixj.reconstruction", 1e-8),
    ("sixj.composition", 1e-8),
    ("sixj.duality", 1e-8),
    ("sixj.scalar_product", 1e-6),
];

pub fn default_tolerance(key: &str) -> Option<f64> {
    TOLERANCES.iter().find(|(k, _)| *k == key).map(|&(_, t)| t)
}

/// How the configured `eta` magnitude is placed in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaKindArg {
    Real,
    Imaginary,
    Zero,
}

impl FromStr for EtaKindArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(EtaKindArg::Real),
            "imaginary" => Ok(EtaKindArg::Imaginary),
            "zero" => Ok(EtaKindArg::Zero),
            _ => Err(Error::Config(format!("unknown eta kind '{s}' (expected real, imaginary or zero)"))),
        }
    }
}

/// Parameters of one verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    pub tau_im: f64,
    /// magnitude of `eta`; `eta = eta`, `i eta` or `0` per `eta_kind`
    pub eta: f64,
    pub eta_kind: EtaKindArg,
    pub n: usize,
    pub grid: (usize, usize),
    pub seed: u64,
    pub tol_overrides: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Suite::ALL.to_vec(),
            tau_im: 0.25,
            eta: 0.05,
            eta_kind: EtaKindArg::Real,
            n: 3,
            grid: (64, 64),
            seed: 42,
            tol_overrides: BTreeMap::new(),
        }
    }
}

impl SuiteConfig {
    pub fn eta_complex(&self) -> C64 {
        match self.eta_kind {
            EtaKindArg::Real => C64::new(self.eta, 0.0),
            EtaKindArg::Imaginary => C64::new(0.0, self.eta),
            EtaKindArg::Zero => C64::new(0.0, 0.0),
        }
    }

    /// Check ranges and build the modular context.
    pub fn validate(&self) -> Result<ModularContext> {
        if !(self.tau_im.is_finite() && self.tau_im > 0.0) {
            return Err(Error::Config(format!("tau_im = {} must be positive", self.tau_im)));
        }
        if !self.eta.is_finite() {
            return Err(Error::Config(format!("eta = {} must be finite", self.eta)));
        }
        if self.grid.0 == 0 || self.grid.1 == 0 {
            return Err(Error::Config(format!("grid {}x{} must have positive sides", self.grid.0, self.grid.1)));
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suite selected".into()));
        }
        for (k, &v) in &self.tol_overrides {
            if default_tolerance(k).is_none() {
                return Err(Error::Config(format!("unknown tolerance key '{k}'")));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("tolerance {k} = {v} must be positive")));
            }
        }
        let eta = self.eta_complex();
        if self.eta_kind != EtaKindArg::Zero && !in_metric_range(eta, self.n, self.tau_im) {
            let (name, range) = match self.eta_kind {
                EtaKindArg::Imaginary => ("I", ParamRange::new(RangeKind::IN, self.n)),
                _ => ("R", ParamRange::new(RangeKind::RN, self.n)),
            };
            return Err(Error::Config(format!(
                "eta = {} outside {name}_{}: |eta| < {} required",
                self.eta,
                self.n,
                range.bound(self.tau_im)
            )));
        }
        ModularContext::new(self.tau_im, eta).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tol_overrides
            .get(key)
            .copied()
            .or_else(|| default_tolerance(key))
            .expect("every case key has a default tolerance")
    }
}

/// Outcome of one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub suite: Suite,
    pub name: String,
    pub params: Value,
    /// `None` when the check raised an error
    pub residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub max_residual: Option<f64>,
    /// Seconds spent in [`run`]; not serialized, so reports stay byte-stable.
    #[serde(skip)]
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: SuiteConfig,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }
}

/// 64-bit FNV-1a, used to derive per-case seeds from case keys.
fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn cval(z: C64) -> Value {
    json!([z.re, z.im])
}

struct Runner<'a> {
    cfg: &'a SuiteConfig,
    suite: Suite,
    out: Vec<CaseRecord>,
}

impl Runner<'_> {
    fn sampler(&self, name: &str) -> Sampler {
        Sampler::new(self.cfg.seed ^ fnv1a(&format!("{}.{name}", self.suite)))
    }

    fn case(&mut self, name: &str, params: Value, f: impl FnOnce(&mut Sampler) -> Result<f64>) {
        let key = format!("{}.{name}", self.suite);
        let tol = self.cfg.tolerance(&key);
        let mut s = self.sampler(name);
        let (residual, error) = match f(&mut s) {
            Ok(r) if r.is_nan() => (None, Some("residual is NaN".to_string())),
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let pass = residual.is_some_and(|r| r <= tol);
        self.out.push(CaseRecord { suite: self.suite, name: name.to_string(), params, residual, tol, pass, error });
    }
}

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut worst = 0.0_f64;
    for r in it {
        let r = r?;
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
    }
    Ok(worst)
}

const SAMPLES: usize = 20;

fn theta_suite(r: &mut Runner, c: &ModularContext) {
    let p = json!({ "samples": SAMPLES });
    r.case("addition", p.clone(), |s| {
        max_of((0..SAMPLES).map(|_| {
            let [x, y, u, v] = [0; 4].map(|_| s.cell_point(c));
            Ok(check_addition(x, y, u, v, c))
        }))
    });
    r.case("duplication", p.clone(), |s| max_of((0..SAMPLES).map(|_| Ok(check_duplication(s.cell_point(c), c)))));
    r.case("jacobi", p.clone(), |s| {
        max_of((0..SAMPLES).map(|_| Ok(check_jacobi([0; 4].map(|_| s.cell_point(c)), c))))
    });
    for n in 3..=6 {
        r.case(&format!("n_term_{n}"), json!({ "samples": SAMPLES, "n": n }), |s| {
            max_of((0..SAMPLES).map(|_| {
                let xs: Vec<C64> = (0..n).map(|_| s.cell_point(c)).collect();
                let mut ys: Vec<C64> = (0..n - 1).map(|_| s.cell_point(c)).collect();
                ys.push(xs.iter().sum::<C64>() - ys.iter().sum::<C64>());
                check_pf(&xs, &ys, c)
            }))
        });
    }
    r.case("modular", p.clone(), |s| max_of((0..SAMPLES).map(|_| check_modular(s.cell_point(c), c))));
    r.case("quasi_periodicity", p.clone(), |s| {
        max_of((0..SAMPLES).map(|_| Ok(check_quasi_periodicity(s.cell_point(c), c))))
    });
    r.case("series_product", p, |s| {
        max_of((0..SAMPLES).map(|_| check_series_product(s.complex_box(2.0), c)))
    });
    r.case("prime_zero", json!({}), |_| {
        Ok(rel_diff(theta_prime(C64::new(0.0, 0.0), c)?, C64::new(theta_prime_zero_closed(c), 0.0)))
    });
}

fn random_basis(s: &mut Sampler, n: usize, c: &ModularContext) -> BasisParams {
    BasisParams::new(n, s.cell_point(c), s.cell_point(c), *c)
}

fn space_suite(r: &mut Runner, c: &ModularContext, n: usize) {
    let p = json!({ "n": n });
    r.case("membership", p.clone(), |s| {
        let bp = random_basis(s, n, c);
        max_of((0..=n).map(|k| Ok(membership_residual(&bp.basis_fn(k)?, c, 6, k as u64))))
    });
    r.case("sigma_involution", p.clone(), |s| {
        let bp = random_basis(s, n, c);
        let x = s.cell_point(c);
        max_of((0..=n).map(|k| {
            let f = bp.basis_fn(k)?;
            Ok(normalized([sigma(&sigma(&f, c), c).eval(x), -f.eval(x)]))
        }))
    });
    r.case("sigma_closed_form", p.clone(), |s| {
        let bp = random_basis(s, n, c);
        let x = s.cell_point(c);
        max_of((0..=n).map(|k| Ok(rel_diff(sigma(&bp.basis_fn(k)?, c).eval(x), sigma_e_closed(k, x, &bp)))))
    });
    r.case("param_shifts", p.clone(), |s| {
        let bp = random_basis(s, n, c);
        let x = s.cell_point(c);
        max_of((0..=n).map(|k| Ok(basis_param_shifts(k, x, &bp)?.max())))
    });
    r.case("kernel_membership", p.clone(), |s| Ok(membership_residual(&kernel_fn(s.cell_point(c), n, c), c, 6, 1)));
    r.case("coefficients", p, |s| {
        let bp = random_basis(s, n, c);
        let w: Vec<C64> = (0..=n).map(|_| s.complex_box(1.0)).collect();
        let (b, w2) = (bp, w.clone());
        let f = ThetaFn::new(n, move |x| (0..=n).map(|k| w2[k] * b.e(k, x)).sum());
        let (got, _) = coefficients(&f, &bp, 5)?;
        let scale = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(got.iter().zip(&w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale)
    });
}

fn random_delta(s: &mut Sampler, n: usize, c: &ModularContext) -> DeltaParams {
    DeltaParams::new(s.cell_point(c), s.cell_point(c), s.cell_point(c), n, *c)
}

fn operators_suite(r: &mut Runner, c: &ModularContext, n: usize) {
    let p = json!({ "n": n });
    let nonzero = c.eta_kind() != EtaKind::Zero;
    r.case("eigenvalue", p.clone(), |s| {
        max_of((0..=n).map(|k| {
            let (a1, a2, a3) = (s.cell_point(c), s.cell_point(c), s.cell_point(c));
            gev_residual(a1, a2, a3, k, n, s.cell_point(c), c)
        }))
    });
    r.case("tridiagonal", p.clone(), |s| {
        let dp = random_delta(s, n, c);
        let (lambda, mu) = (s.cell_point(c), s.cell_point(c));
        max_of((0..=n).map(|k| Ok(tridiag_coeffs(&dp, lambda, mu, k, k as u64 + 1)?.residual)))
    });
    r.case("locality", p.clone(), |s| {
        let dp = random_delta(s, n, c);
        let (lambda, mu) = (s.cell_point(c), s.cell_point(c));
        max_of((0..=n).map(|k| Ok(tridiag_locality(&dp, lambda, mu, k, k as u64 + 1)?.0)))
    });
    r.case("sigma_conjugation", p.clone(), |s| {
        let dp = random_delta(s, n, c);
        let bp = random_basis(s, n, c);
        let x = s.cell_point(c);
        max_of((0..=n).map(|k| sigma_conjugation_residual(&dp, &bp.basis_fn(k)?, x)))
    });
    if nonzero {
        r.case("s_proportionality", p.clone(), |s| {
            let bp = random_basis(s, n, c);
            let x = s.cell_point(c);
            max_of((0..=n).map(|k| s_proportionality_joint(&bp.basis_fn(k)?, x, c)))
        });
        r.case("delta_from_s", p.clone(), |s| {
            let dp = random_delta(s, n, c);
            let bp = random_basis(s, n, c);
            let x = s.cell_point(c);
            max_of((0..=n).map(|k| delta_from_s(&dp, &bp.basis_fn(k)?, x)))
        });
    }
    r.case("four_term", p, |s| {
        max_of((0..SAMPLES).map(|_| {
            let a = random_delta(s, n, c).a;
            Ok(four_term_residual(s.cell_point(c), a, c))
        }))
    });
}

fn metric_context(cfg: &SuiteConfig, c: &ModularContext) -> Result<MetricContext> {
    MetricContext::new(*c, cfg.n, cfg.grid.0, cfg.grid.1)
}

fn grid_params(cfg: &SuiteConfig) -> Value {
    json!({ "n": cfg.n, "grid": [cfg.grid.0, cfg.grid.1] })
}

fn metric_suite(r: &mut Runner, c: &ModularContext, cfg: &SuiteConfig) {
    let n = cfg.n;
    let mc = metric_context(cfg, c);
    let gp = grid_params(cfg);
    let mc = &mc;
    r.case("hermitian", gp.clone(), |s| {
        let mc = mc.as_ref().map_err(Clone::clone)?;
        let bp = random_basis(s, n, c);
        let (f, g) = (bp.basis_fn(0)?, bp.basis_fn(n)?);
        let (fg, gf) = (mc.inner(&f, &g)?, mc.inner(&g, &f)?);
        Ok((fg - gf.conj()).norm() / fg.norm())
    });
    r.case("adjoint", gp.clone(), |s| {
        let mc = mc.as_ref().map_err(Clone::clone)?;
        let bp = random_basis(s, n, c);
        let dp = random_delta(s, n, c);
        max_of((0..=n).map(|k| adjoint_residual(&dp, &bp.basis_fn(k)?, &bp.basis_fn(n - k)?, mc)))
    });
    if c.eta_kind() != EtaKind::Zero {
        r.case("s_selfadjoint", gp.clone(), |s| {
            let mc = mc.as_ref().map_err(Clone::clone)?;
            let bp = random_basis(s, n, c);
            s_selfadjoint_joint(&bp.basis_fn(0)?, &bp.basis_fn(n)?, mc)
        });
    }
    r.case("doubling", gp.clone(), |s| {
        let mc = mc.as_ref().map_err(Clone::clone)?;
        let bp = random_basis(s, n, c);
        max_of((0..=n).map(|k| Ok(mc.inner_with_doubling(&bp.basis_fn(k)?, &bp.basis_fn(n - k)?)?.1)))
    });
    let gamma = (n as f64 + 1.0) * c.eta() + 0.5 + c.tau() / 2.0;
    let lp = json!({ "gamma": cval(gamma) });
    r.case("lemma_i", lp.clone(), |_| Ok((lemma_integrals(gamma, c)?.0 - lemma_i_closed(gamma, c)).norm()));
    r.case("lemma_j", lp, |_| Ok((lemma_integrals(gamma, c)?.1 - lemma_j_closed(gamma, c)).norm()));
    let grid = mc.as_ref().map(|m| m.grid);
    r.case("lemma_2d", json!({ "gamma": cval(gamma), "grid": [cfg.grid.0, cfg.grid.1] }), |_| {
        fil_integral(gamma, c, grid.map_err(Clone::clone)?)
    });
}

fn kernel_suite(r: &mut Runner, c: &ModularContext, cfg: &SuiteConfig) {
    let n = cfg.n;
    let mc = metric_context(cfg, c);
    let mc = &mc;
    r.case("trace", grid_params(cfg), |_| trace_residual(mc.as_ref().map_err(Clone::clone)?));
    r.case("reproducing", json!({ "n": n, "grid": [cfg.grid.0, cfg.grid.1], "points": 10 }), |s| {
        let mc = mc.as_ref().map_err(Clone::clone)?;
        let bp = random_basis(s, n, c);
        let us: Vec<C64> = (0..10).map(|_| s.cell_point(c)).collect();
        max_of((0..=n).flat_map(|k| us.iter().map(move |&u| (k, u))).map(|(k, u)| {
            reproducing_residual(&bp.basis_fn(k)?, u, mc)
        }))
    });
    if c.eta_kind() != EtaKind::Zero {
        let (a1, a2) = kernel_basis_params(c);
        r.case("expansion", json!({ "n": n, "a1": cval(a1), "a2": cval(a2), "points": 10 }), |s| {
            max_of((0..10).map(|_| {
                let u = s.cell_point(c);
                let v = u + s.complex_box(0.1);
                kernel_expansion_residual(a1, a2, u, v, n, c)
            }))
        });
    }
}

const BIORTHO_A: (C64, C64) = (C64::new(0.31, 0.06), C64::new(0.12, 0.03));
const POSITIVITY_A1: C64 = C64::new(0.27, 0.04);

/// Five evenly spaced `eta` in `R_{N-1} \ R_N` (or `I_{N-1} \ I_N`).
pub fn extended_range_samples(kind: EtaKind, n: usize, tau_im: f64) -> Vec<C64> {
    let imag = kind == EtaKind::Imaginary;
    let (inner, outer) = if imag {
        (ParamRange::new(RangeKind::IN, n), ParamRange::new(RangeKind::INminus1, n))
    } else {
        (ParamRange::new(RangeKind::RN, n), ParamRange::new(RangeKind::RNminus1, n))
    };
    let (lo, hi) = (inner.bound(tau_im), outer.bound(tau_im));
    (0..5)
        .map(|j| {
            let e = lo + (j as f64 + 0.5) / 5.0 * (hi - lo);
            if imag {
                C64::new(0.0, e)
            } else {
                C64::new(e, 0.0)
            }
        })
        .collect()
}

fn biortho_suite(r: &mut Runner, c: &ModularContext, cfg: &SuiteConfig) {
    let n = cfg.n;
    let (a1, a2) = BIORTHO_A;
    let mc = metric_context(cfg, c);
    let gram = mc.as_ref().map_err(Clone::clone).and_then(|mc| gram_check(a1, a2, mc));
    let gp = json!({ "n": n, "grid": [cfg.grid.0, cfg.grid.1], "a1": cval(a1), "a2": cval(a2) });
    r.case("gram_off_diagonal", gp.clone(), |_| Ok(gram.clone()?.off_diagonal));
    r.case("gram_diagonal", gp, |_| Ok(gram.clone()?.diagonal));
    if c.eta_kind() == EtaKind::Zero {
        return;
    }
    r.case("gamma_recurrence", json!({ "n": n, "a1": cval(a1), "a2": cval(a2) }), |_| {
        gamma_recurrence_residual(a1, a2, n, c)
    });
    if n >= 1 {
        let etas = extended_range_samples(c.eta_kind(), n, c.tau_im());
        let ep: Vec<Value> = etas.iter().map(|&e| cval(e)).collect();
        r.case("positivity", json!({ "n": n, "a1": cval(POSITIVITY_A1), "etas": ep }), |_| {
            let recs = positivity_extended(POSITIVITY_A1, n, &etas, c)?;
            if let Some(bad) = recs.iter().find(|r| r.value.re <= 0.0) {
                return Err(Error::DegenerateParams(format!("C^-1 |e_{}|^2 = {} at eta = {}", bad.k, bad.value, bad.eta)));
            }
            Ok(recs.iter().map(|r| r.rel_imag).fold(0.0, f64::max))
        });
    }
}

/// The context used by the gamma-function cases: the configured one when
/// `eta` is imaginary, otherwise `eta = i min(|eta|, b/2)` with `b` the bound of `I_N`.
pub fn gamma_context(c: &ModularContext, n: usize) -> Result<ModularContext> {
    if c.eta_kind() == EtaKind::Imaginary {
        return Ok(*c);
    }
    let half = 0.5 * ParamRange::new(RangeKind::IN, n).bound(c.tau_im());
    let e = if c.eta_kind() == EtaKind::Zero { half } else { c.eta().norm().min(half) };
    c.with_eta(C64::new(0.0, e))
}

fn hypergeo_suite(r: &mut Runner, c: &ModularContext, n: usize) {
    if c.eta_kind() != EtaKind::Zero {
        r.case("frenkel_turaev", json!({ "sets": 50, "n_max": 8, "max_condition": 1e4 }), |s| {
            max_of((0..50).map(|i| Ok(frenkel_turaev(&sample_balanced(s, i % 9, 1e4, c)?, c)?.residual)))
        });
        r.case("frenkel_turaev_termwise", json!({ "sets": 50, "n_max": 8 }), |s| {
            max_of((0..50).map(|i| {
                let mut z = || C64::new(s.uniform(-3.0, 3.0), s.uniform(-1.0, 1.0));
                let ft = FTParams::new(z(), z(), z(), z(), i % 9);
                Ok(frenkel_turaev(&ft, c)?.termwise)
            }))
        });
        let (a1, a2) = kernel_basis_params(c);
        let kp = json!({ "n": n, "a1": cval(a1), "a2": cval(a2), "points": 10 });
        r.case("kernel_substitution", kp.clone(), |s| {
            max_of((0..10).map(|_| {
                let u = s.cell_point(c);
                let v = u + s.complex_box(0.1);
                Ok(frenkel_turaev(&FTParams::from_kernel(a1, a2, u, v, n, c)?, c)?.residual)
            }))
        });
        r.case("kernel_tie", kp, |s| {
            max_of((0..10).map(|_| kernel_tie_residual(a1, a2, s.cell_point(c), s.cell_point(c), n, c)))
        });
    }
    let g = gamma_context(c, n);
    let gp = match &g {
        Ok(g) => json!({ "n": n, "eta": cval(g.eta()), "points": SAMPLES }),
        Err(_) => json!({ "n": n }),
    };
    let g = &g;
    r.case("gamma_reflection", gp.clone(), |s| {
        let g = g.as_ref().map_err(Clone::clone)?;
        max_of((0..SAMPLES).map(|_| gamma_reflection_residual(s.complex_box(0.9) + C64::new(0.2, 0.1), g.p(), g.q())))
    });
    r.case("gamma_shift", gp.clone(), |s| {
        let g = g.as_ref().map_err(Clone::clone)?;
        max_of((0..SAMPLES).map(|_| gamma_shift_residual(s.complex_box(0.9) + C64::new(0.2, 0.1), g.p(), g.q())))
    });
    let bdi = |s: &mut Sampler, pick: fn(&crate::ellhyp::BdiCheck) -> f64| {
        let g = g.as_ref().map_err(Clone::clone)?;
        max_of((0..SAMPLES).map(|_| {
            let (z, v, w) = (s.cell_point(g), s.cell_point(g), s.cell_point(g));
            Ok(pick(&bdi_integrand_equiv(z, v, w, n, g)?))
        }))
    };
    r.case("bdi_integrand", gp.clone(), |s| bdi(s, |b| b.integrand));
    r.case("bdi_rhs", gp.clone(), |s| bdi(s, |b| b.rhs));
    r.case("bdi_order_zero", gp, |s| {
        let g = g.as_ref().map_err(Clone::clone)?;
        max_of((0..5).map(|_| bdi_order_zero_residual(s.cell_point(g), g)))
    });
}

fn sixj_params(s: &mut Sampler) -> [C64; 4] {
    let base = [C64::new(0.31, 0.04), C64::new(-0.17, 0.02), C64::new(0.12, -0.03), C64::new(-0.36, 0.05)];
    base.map(|z| z + s.complex_box(0.05))
}

fn sixj_suite(r: &mut Runner, c: &ModularContext, cfg: &SuiteConfig) {
    if c.eta_kind() == EtaKind::Zero {
        return;
    }
    let n = cfg.n;
    let p = json!({ "n": n });
    let id = |m: &CMatrix| CMatrix::identity(m.nrows(), m.ncols());
    r.case("identity", p.clone(), |s| {
        let [a, b, ..] = sixj_params(s);
        let t = sixj_solve(a, b, a, b, n, c)?;
        Ok((t.matrix() - id(&t.matrix())).norm())
    });
    r.case("reconstruction", p.clone(), |s| {
        let [a, b, cc, d] = sixj_params(s);
        Ok(sixj_solve(a, b, cc, d, n, c)?.holdout_residual)
    });
    r.case("composition", p.clone(), |s| {
        let [a, b, cc, d] = sixj_params(s);
        let fwd = sixj_solve(a, b, cc, d, n, c)?.matrix();
        let back = sixj_solve(cc, d, a, b, n, c)?.matrix();
        Ok((&fwd * &back - id(&fwd)).norm())
    });
    r.case("duality", p, |s| {
        let [a, b, cc, d] = sixj_params(s);
        sixj_duality_residual(a, b, cc, d, n, c)
    });
    let mc = metric_context(cfg, c);
    r.case("scalar_product", grid_params(cfg), |s| {
        let mc = mc.as_ref().map_err(Clone::clone)?;
        let [a, b, cc, d] = sixj_params(s);
        let t = sixj_solve(a, b, cc, d, n, c)?;
        max_of((0..=n).flat_map(|k| (0..=n).map(move |l| (k, l))).map(|(k, l)| {
            sixj_scalar_product_residual(&t, k, l, mc)
        }))
    });
}

/// Run the configured suites. Fails only on an invalid configuration; a
/// failing or erroring case is recorded in the report.
pub fn run(config: &SuiteConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let c = config.validate()?;
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let mut cases = Vec::new();
    for suite in suites {
        let mut r = Runner { cfg: config, suite, out: Vec::new() };
        match suite {
            Suite::Theta => theta_suite(&mut r, &c),
            Suite::Space => space_suite(&mut r, &c, config.n),
            Suite::Operators => operators_suite(&mut r, &c, config.n),
            Suite::Metric => metric_suite(&mut r, &c, config),
            Suite::Kernel => kernel_suite(&mut r, &c, config),
            Suite::Biortho => biortho_suite(&mut r, &c, config),
            Suite::Hypergeo => hypergeo_suite(&mut r, &c, config.n),
            Suite::Sixj => sixj_suite(&mut r, &c, config),
        }
        cases.extend(r.out);
    }
    cases.sort_by(|a, b| (a.suite, &a.name).cmp(&(b.suite, &b.name)));
    let passed = cases.iter().filter(|c| c.pass).count();
    let max_residual = cases.iter().filter_map(|c| c.residual).reduce(f64::max);
    let summary = Summary { total: cases.len(), passed, max_residual, wall_time_s: start.elapsed().as_secs_f64() };
    Ok(VerificationReport { config: config.clone(), cases, summary })
}

/// Output format of [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(Error::Config(format!("unknown format '{s}' (expected json, csv or text)"))),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn residual_text(r: Option<f64>) -> String {
    r.map_or_else(|| "error".to_string(), |v| format!("{v:.3e}"))
}

/// Render a report; the result depends only on the report contents.
pub fn render(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Csv => {
            let mut out = String::from("suite,name,residual,tol,pass,params\n");
            for c in &report.cases {
                let residual = c.residual.map_or_else(String::new, |v| format!("{v:e}"));
                let _ = writeln!(
                    out,
                    "{},{},{residual},{:e},{},{}",
                    c.suite,
                    csv_field(&c.name),
                    c.tol,
                    c.pass,
                    csv_field(&c.params.to_string())
                );
            }
            out
        }
        Format::Text => {
            let cfg = &report.config;
            let mut out = String::new();
            let _ = writeln!(
                out,
                "tau = {}i, eta = {} ({:?}), N = {}, grid {}x{}, seed {}",
                cfg.tau_im, cfg.eta, cfg.eta_kind, cfg.n, cfg.grid.0, cfg.grid.1, cfg.seed
            );
            for c in &report.cases {
                let verdict = if c.pass { "ok  " } else { "FAIL" };
                let key = format!("{}.{}", c.suite, c.name);
                let _ = write!(out, "{verdict} {key:<34} {:>10} <= {:e}", residual_text(c.residual), c.tol);
                if let Some(e) = &c.error {
                    let _ = write!(out, "  ({e})");
                }
                out.push('\n');
            }
            let _ = writeln!(out, "PASSED {}/{}", report.summary.passed, report.summary.total);
            out
        }
    }
}

/// Write a rendered report to `path`, or to standard output when `path` is `None`.
pub fn emit(report: &VerificationReport, format: Format, path: Option<&Path>) -> Result<()> {
    let s = render(report, format);
    match path {
        Some(p) => std::fs::write(p, s)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(s.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
