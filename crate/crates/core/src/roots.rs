//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Plain bisection on `[lo, hi]` until the bracket is narrower than `width`.
/// `f(lo)` and `f(hi)` must have opposite signs (zero counts as either).
pub fn bisect<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    width: f64,
) -> Result<(f64, f64)> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok((lo, lo));
    }
    if f_hi == 0.0 {
        return Ok((hi, hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoConvergence(format!(
            "no sign change on [{lo}, {hi}] ({f_lo:e}, {f_hi:e})"
        )));
    }
    for _ in 0..400 {
        if (hi - lo).abs() <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok((mid, mid));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Bisection down to `coarse_frac` of the initial bracket, then Newton steps
/// that fall back to bisection whenever they leave the bracket.
///
/// `f` returns `(value, derivative)`. Stops when a step is below
/// `rel_tol * |x|`.
pub fn newton_bracketed<F: FnMut(f64) -> Result<(f64, f64)>>(
    mut f: F,
    lo: f64,
    hi: f64,
    coarse_frac: f64,
    rel_tol: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = bisect(|x| f(x).map(|v| v.0), lo, hi, coarse_frac * (hi - lo).abs())?;
    if lo == hi {
        return Ok(lo);
    }
    let sign_lo = f(lo)?.0.signum();
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    for _ in 0..200 {
        let (v, d) = f(x)?;
        if v == 0.0 {
            return Ok(x);
        }
        if v.signum() == sign_lo {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / d;
        // Newton only while it stays inside the bracket and at least halves
        // the previous step; otherwise bisect.
        let next = if newton.is_finite()
            && newton > lo.min(hi)
            && newton < lo.max(hi)
            && (2.0 * v).abs() <= (dx_old * d).abs()
        {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        dx_old = step;
        x = next;
        if step <= rel_tol * x.abs() || (hi - lo).abs() <= rel_tol * x.abs() {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence(format!("newton stalled near {x}")))
}
