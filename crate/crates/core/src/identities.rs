//! Residual checks for the classical theta function identities.
//!
//! Every check returns `|sum of signed terms| / max |term|`, which makes the
//! thresholds scale free. A vanishing scale gives residual zero.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::theta::{theta, ModularContext, C64, I};

/// `|total| / max(|terms|)` with `0/0 = 0`.
pub fn normalized<It: IntoIterator<Item = C64>>(terms: It) -> f64 {
    let mut total = C64::new(0.0, 0.0);
    let mut scale = 0.0_f64;
    for t in terms {
        total += t;
        scale = scale.max(t.norm());
    }
    if scale == 0.0 {
        if total.norm() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        total.norm() / scale
    }
}

/// Relative distance `|a - b| / max(|a|, |b|)`.
pub fn rel_diff(a: C64, b: C64) -> f64 {
    normalized([a, -b])
}

/// `theta(x +- y, u +- v) - theta(u +- x, v +- y) + theta(u +- y, v +- x)`.
pub fn check_addition(x: C64, y: C64, u: C64, v: C64, ctx: &ModularContext) -> f64 {
    let lhs = ctx.th_pm(x, y) * ctx.th_pm(u, v);
    let r1 = ctx.th_pm(u, x) * ctx.th_pm(v, y);
    let r2 = ctx.th_pm(u, y) * ctx.th_pm(v, x);
    normalized([lhs, -r1, r2])
}

/// The n-term identity
/// `sum_k prod_j theta(x_k - y_j) / prod_{j != k} theta(x_k - x_j) = 0`
/// for `sum x = sum y`.
pub fn check_pf(xs: &[C64], ys: &[C64], ctx: &ModularContext) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::InvalidParameter("xs and ys must have the same positive length".into()));
    }
    let sx: C64 = xs.iter().sum();
    let sy: C64 = ys.iter().sum();
    let mag: f64 = xs.iter().chain(ys).map(|z| z.norm()).fold(1.0, f64::max);
    if (sx - sy).norm() > 1e-12 * mag {
        return Err(Error::InvalidParameter("sum(xs) must equal sum(ys)".into()));
    }
    for (k, &xk) in xs.iter().enumerate() {
        for &xj in &xs[k + 1..] {
            let d = ctx.lattice_distance(xk - xj);
            if d < 1e-6 {
                return Err(Error::DegenerateNodes { distance: d });
            }
        }
    }
    let terms: Vec<C64> = xs
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            let num = ctx.th_prod(ys.iter().map(|&y| xk - y));
            let den = ctx.th_prod(
                xs.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &xj)| xk - xj),
            );
            num / den
        })
        .collect();
    Ok(normalized(terms))
}

/// `theta(2x) = i p^{1/8} / (p;p)^3 theta(x, x + 1/2, x + tau/2, x - 1/2 - tau/2)`.
pub fn check_duplication(x: C64, ctx: &ModularContext) -> f64 {
    let h = ctx.tau() / 2.0;
    let lhs = ctx.th(2.0 * x);
    let rhs = I * ctx.p_pow(0.125) / ctx.pp().powi(3)
        * ctx.th_prod([x, x + 0.5, x + h, x - 0.5 - h]);
    normalized([lhs, -rhs])
}

/// Jacobi's (Riemann's) four-term relation with `B = b_1 + ... + b_4`.
pub fn check_jacobi(b: [C64; 4], ctx: &ModularContext) -> f64 {
    let tau = ctx.tau();
    let big_b: C64 = b.iter().sum();
    let shifted = |s: C64| ctx.th_prod(b.iter().map(|&bi| bi + s));
    let e = (PI * I * (tau + big_b)).exp();
    let lhs = shifted(-big_b / 2.0);
    let zero = C64::new(0.0, 0.0);
    let t1 = shifted(zero);
    let t2 = shifted(C64::new(0.5, 0.0));
    let t3 = e * shifted(tau / 2.0);
    let t4 = -e * shifted(0.5 + tau / 2.0);
    normalized([lhs, -0.5 * t1, -0.5 * t2, -0.5 * t3, -0.5 * t4])
}

/// `theta_1(x/tau | -1/tau) = -i (tau/i)^{1/2} e^{pi i x^2 / tau} theta_1(x | tau)`.
pub fn check_modular(x: C64, ctx: &ModularContext) -> Result<f64> {
    let tau = ctx.tau();
    let dual = ModularContext::with_tolerance(1.0 / ctx.tau_im(), ctx.eta(), ctx.tol(), ctx.max_terms())?;
    let lhs = theta(x / tau, &dual)?;
    let root = (tau / I).sqrt();
    let rhs = -I * root * (PI * I * x * x / tau).exp() * theta(x, ctx)?;
    Ok(normalized([lhs, -rhs]))
}

/// Residuals of `theta(x+1) = -theta(x)` and
/// `theta(x+tau) = -e^{-pi i (2x+tau)} theta(x)`.
pub fn check_quasi_periodicity(x: C64, ctx: &ModularContext) -> f64 {
    let tau = ctx.tau();
    let t = ctx.th(x);
    let r1 = normalized([ctx.th(x + 1.0), t]);
    let r2 = normalized([ctx.th(x + tau), (-PI * I * (2.0 * x + tau)).exp() * t]);
    r1.max(r2)
}

/// Series against triple product, relative to `max(1, |theta(x)|)`.
pub fn check_series_product(x: C64, ctx: &ModularContext) -> Result<f64> {
    let a = theta(x, ctx)?;
    let b = crate::theta::theta_product(x, ctx)?;
    Ok((a - b).norm() / a.norm().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    fn ctx() -> ModularContext {
        ModularContext::new(0.25, C64::new(0.05, 0.0)).unwrap()
    }

    #[test]
    fn addition_random_and_degenerate() {
        let c = ctx();
        let mut s = Sampler::new(1);
        for _ in 0..20 {
            let [x, y, u, v] = [0; 4].map(|_| s.cell_point(&c));
            assert!(check_addition(x, y, u, v, &c) <= 1e-11);
        }
        let x = C64::new(0.3, 0.1);
        assert_eq!(check_addition(x, x, C64::new(0.2, 0.05), C64::new(0.7, 0.02), &c), 0.0);
        let v = C64::new(0.61, 0.12);
        assert!(check_addition(x, C64::new(0.4, 0.03), x, v, &c) <= 1e-11);
    }

    #[test]
    fn pf_two_terms_and_coincident() {
        let c = ctx();
        let (s, t) = (C64::new(0.21, 0.04), C64::new(0.57, 0.11));
        let y1 = C64::new(0.33, 0.02);
        assert!(check_pf(&[s, t], &[y1, s + t - y1], &c).unwrap() <= 1e-11);
        assert_eq!(check_pf(&[s, t], &[s, t], &c).unwrap(), 0.0);
        assert!(matches!(
            check_pf(&[s, s + 1.0], &[s, s + 1.0], &c),
            Err(Error::DegenerateNodes { .. })
        ));
        assert!(check_pf(&[s, t], &[s, s], &c).is_err());
    }

    #[test]
    fn pf_five_terms() {
        let c = ctx();
        let mut smp = Sampler::new(5);
        let xs: Vec<C64> = (0..5).map(|_| smp.cell_point(&c)).collect();
        let mut ys: Vec<C64> = (0..4).map(|_| smp.cell_point(&c)).collect();
        let last = xs.iter().sum::<C64>() - ys.iter().sum::<C64>();
        ys.push(last);
        assert!(check_pf(&xs, &ys, &c).unwrap() <= 1e-10);
    }

    #[test]
    fn duplication_jacobi_modular() {
        let c = ctx();
        assert!(check_duplication(C64::new(0.21, 0.05), &c) <= 1e-11);
        let beta = C64::new(0.17, 0.06);
        assert!(check_jacobi([beta, beta, -beta, -beta], &c) <= 1e-11);
        assert!(check_jacobi(
            [C64::new(0.1, 0.02), C64::new(0.33, 0.1), C64::new(0.7, 0.05), C64::new(0.45, 0.2)],
            &c
        ) <= 1e-11);
        assert_eq!(check_modular(C64::new(0.0, 0.0), &c).unwrap(), 0.0);
        assert!(check_modular(C64::new(0.23, 0.04), &c).unwrap() <= 1e-11);
    }

    #[test]
    fn conjugation_symmetry() {
        let c = ctx();
        let x = C64::new(0.41, 0.09);
        assert!((c.th(x.conj()) - c.th(x).conj()).norm() <= 1e-12 * c.th(x).norm());
    }
}
