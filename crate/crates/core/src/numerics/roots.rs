//! Bracketing root finders and a golden-section minimizer.

use crate::error::{Error, Result};

const MAX_ITER: usize = 400;

/// Bisection on a sign-changing bracket `[a, b]`.
///
/// Stops once the bracket width is below `max(rel_tol * |x|, abs_tol)`.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket(format!(
            "f({lo}) = {f_lo}, f({hi}) = {f_hi} do not bracket a root"
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= (rel_tol * mid.abs()).max(abs_tol) || mid <= lo || mid >= hi {
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
    Ok(0.5 * (lo + hi))
}

/// Smallest `tau` in `(lo, hi]` with `pred(tau)` true, given `pred(lo)` false and
/// `pred(hi)` true. Returns the upper end of the final bracket.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(mut pred: P, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Grows `hi` geometrically from `lo` until `f(hi) > 0`, with `f(lo) <= 0` assumed.
pub fn grow_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    initial_width: f64,
    cap: f64,
) -> Result<(f64, f64)> {
    let mut width = initial_width;
    let mut a = lo;
    loop {
        let b = lo + width;
        if b > cap {
            let fb = f(cap);
            if fb > 0.0 {
                return Ok((a, cap));
            }
            return Err(Error::NoBracket(format!("no sign change below cap {cap}")));
        }
        if f(b) > 0.0 {
            return Ok((a, b));
        }
        a = b;
        width *= 2.0;
    }
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns the final bracket `(lo, x_best, hi)`.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> (f64, f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_ITER {
        if hi - lo <= rel_tol * 0.5 * (lo.abs() + hi.abs()) {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let best = if fc <= fd { c } else { d };
    (lo, best, hi)
}
