//! Bracketed root finding: bisection to a coarse bracket, then a
//! safeguarded secant polish.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub evaluations: usize,
}

/// Find the root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` must have
/// opposite signs. Stops once `|f(x)| <= f_tol` or the bracket collapses to
/// `x_tol`.
pub fn bisect_secant(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    f_tol: f64,
    x_tol: f64,
) -> Result<Root> {
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    let mut evaluations = 2;
    if f_lo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, evaluations });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, evaluations });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::numerical(
            format!("no sign change on [{lo}, {hi}]"),
            f_lo.abs().min(f_hi.abs()),
        ));
    }

    // Coarse phase.
    let coarse = (hi - lo).abs() * 1e-4;
    while (hi - lo).abs() > coarse.max(x_tol) {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        evaluations += 1;
        if f_mid == 0.0 {
            return Ok(Root { x: mid, residual: 0.0, evaluations });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }

    // Secant polish, falling back to bisection when the step leaves the bracket.
    let (mut best, mut f_best) = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    for _ in 0..200 {
        if f_best.abs() <= f_tol || (hi - lo).abs() <= x_tol {
            break;
        }
        let mut x = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        if !(x > lo.min(hi) && x < lo.max(hi)) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        evaluations += 1;
        if fx.abs() < f_best.abs() {
            best = x;
            f_best = fx;
        }
        if fx == 0.0 {
            break;
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
    }
    Ok(Root { x: best, residual: f_best.abs(), evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = bisect_secant(|x| Ok(x * x * x - 2.0), 0.0, 3.0, 1e-14, 1e-15).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn decreasing_function() {
        let r = bisect_secant(|x| Ok((-x).exp() - 0.5), 0.0, 5.0, 1e-14, 1e-15).unwrap();
        assert!((r.x - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change_is_error() {
        assert!(bisect_secant(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 1e-12).is_err());
    }
}
