//! Bracketing bisection.

use crate::error::{Error, Result};

/// Bisect `f` on `[lo, hi]` until the bracket is narrower than `x_tol`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, x_tol: f64, max_iter: usize) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NumericalFailure {
            routine: "bisection",
            detail: format!("no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"),
            achieved: hi - lo,
        });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
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
    }
    Err(Error::NumericalFailure {
        routine: "bisection",
        detail: format!("iteration limit {max_iter} reached"),
        achieved: hi - lo,
    })
}
