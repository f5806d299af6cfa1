//! Small dense complex solves, backed by nalgebra's partial-pivot LU.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::theta::C64;

pub type CMatrix = DMatrix<C64>;

/// 1-norm condition number `||A||_1 ||A^-1||_1`; infinite if singular.
pub fn condition_number(a: &CMatrix) -> f64 {
    match a.clone().try_inverse() {
        Some(inv) => one_norm(a) * one_norm(&inv),
        None => f64::INFINITY,
    }
}

fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Row and column scalings `r`, `c` with `diag(r) A diag(c)` having rows and
/// columns of comparable 2-norm (a few alternating sweeps).
fn equilibrate(a: &CMatrix) -> (CMatrix, Vec<f64>, Vec<f64>) {
    let mut m = a.clone();
    let mut r = vec![1.0; a.nrows()];
    let mut c = vec![1.0; a.ncols()];
    for _ in 0..3 {
        for (j, cj) in c.iter_mut().enumerate() {
            let s = m.column(j).norm();
            if s > 0.0 {
                m.column_mut(j).unscale_mut(s);
                *cj /= s;
            }
        }
        for (i, ri) in r.iter_mut().enumerate() {
            let s = m.row(i).norm();
            if s > 0.0 {
                m.row_mut(i).unscale_mut(s);
                *ri /= s;
            }
        }
    }
    (m, r, c)
}

/// Condition number of the equilibrated matrix; this is what bounds the
/// relative error of each solution component.
pub fn equilibrated_condition(a: &CMatrix) -> f64 {
    condition_number(&equilibrate(a).0)
}

/// Solve `A X = B` with row/column equilibration and partial-pivot LU,
/// refusing systems whose equilibrated condition exceeds `max_cond`.
pub fn solve(a: &CMatrix, b: &CMatrix, max_cond: f64) -> Result<(CMatrix, f64)> {
    let (m, r, c) = equilibrate(a);
    let cond = condition_number(&m);
    if !(cond <= max_cond) {
        return Err(Error::IllConditioned { condition: cond });
    }
    let rb = CMatrix::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)] * r[i]);
    let y = m.lu().solve(&rb).ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    let x = CMatrix::from_fn(y.nrows(), y.ncols(), |i, j| y[(i, j)] * c[i]);
    Ok((x, cond))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_reports_condition() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(3.0, 0.0)],
        );
        let b = CMatrix::from_row_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let (x, cond) = solve(&a, &b, 1e8).unwrap();
        let r = &a * &x - &b;
        assert!(r.norm() < 1e-14);
        assert!(cond > 1.0 && cond < 10.0);
    }

    #[test]
    fn equilibration_removes_scaling() {
        let a = CMatrix::from_row_slice(2, 2, &[C64::new(1e8, 0.0), C64::new(1.0, 0.0), C64::new(2e8, 0.0), C64::new(-1.0, 0.0)]);
        assert!(condition_number(&a) > 1e7);
        assert!(equilibrated_condition(&a) < 10.0);
        let b = CMatrix::from_row_slice(2, 1, &[C64::new(1e8 + 1.0, 0.0), C64::new(2e8 - 1.0, 0.0)]);
        let (x, _) = solve(&a, &b, 1e3).unwrap();
        assert!((x[(0, 0)] - 1.0).norm() < 1e-14 && (x[(1, 0)] - 1.0).norm() < 1e-7);
    }

    #[test]
    fn rejects_singular() {
        let a = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        let b = CMatrix::from_element(2, 1, C64::new(1.0, 0.0));
        assert!(matches!(solve(&a, &b, 1e8), Err(Error::IllConditioned { .. })));
    }
}
