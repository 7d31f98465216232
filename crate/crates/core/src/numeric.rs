//! Small numerical helpers shared by the analytic modules.

use crate::error::{Error, Result};

/// Bracketed bisection for a root of `f` in `[lo, hi]`.
///
/// Stops when the bracket is narrower than `rel_tol * max(|lo|, |hi|)` or
/// when the midpoint stops moving in floating point.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::Numerical(format!(
            "no sign change in bracket: f({lo:e}) = {f_lo:e}, f({hi:e}) = {f_hi:e}"
        )));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `(1 - e^{-a}) / a`, continuous at zero.
pub fn one_minus_exp_over(a: f64) -> f64 {
    if a.abs() < 1e-8 {
        1.0 - 0.5 * a
    } else {
        -(-a).exp_m1() / a
    }
}

/// `((1 - e^{-a}) / a - 1) / a`, continuous at zero.
pub fn second_divided_exp(a: f64) -> f64 {
    if a.abs() < 1e-3 {
        -0.5 + a / 6.0 - a * a / 24.0 + a * a * a / 120.0
    } else {
        (one_minus_exp_over(a) - 1.0) / a
    }
}
