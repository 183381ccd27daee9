//! Bracketed scalar root finding: bisection with safeguarded Newton polish.

use crate::error::{Error, Result};

/// Maximum number of bracket-halving steps.
pub const MAX_BISECTIONS: usize = 200;

/// Finds a root of `f` in `[lo, hi]` given a bracket with `sign(f(lo)) != sign(f(hi))`.
///
/// `fdf` returns `(f(x), f'(x))`. Newton steps are taken whenever they stay
/// inside the current bracket and at least halve the residual; otherwise the
/// bracket is bisected. Stops once `|f| <= f_tol` or the bracket has shrunk to
/// a couple of ulps.
pub fn newton_bisect<F>(fdf: F, mut lo: f64, mut hi: f64, f_lo: f64, f_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    if !(lo < hi) {
        return Err(Error::RootFinding(format!("empty bracket [{lo}, {hi}]")));
    }
    let lo_sign = f_lo.signum();
    let mut x = 0.5 * (lo + hi);
    let (mut fx, mut dfx) = fdf(x);
    let mut last_abs = f64::INFINITY;
    for _ in 0..MAX_BISECTIONS {
        if !fx.is_finite() {
            return Err(Error::RootFinding(format!("non-finite value at {x}")));
        }
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi && fx.abs() < 0.5 * last_abs {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_abs = fx.abs();
        if next == x {
            return Ok(x);
        }
        x = next;
        (fx, dfx) = fdf(x);
    }
    Ok(x)
}

/// Plain bisection for functions without a cheap derivative. Same bracket
/// convention and stopping rule as [`newton_bisect`].
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, f_lo: f64, f_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::RootFinding(format!("empty bracket [{lo}, {hi}]")));
    }
    let lo_sign = f_lo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        let fx = f(x)?;
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let mid = 0.5 * (lo + hi);
        if mid == x || hi - lo <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
        x = mid;
    }
    Ok(x)
}
