//! Error function and its inverse.
//!
//! `erf` is the scaled Gaussian integral `E(y) = 2/sqrt(pi) * int_0^y exp(-z^2) dz`
//! that appears throughout the front asymptotics.

use crate::error::{Error, Result};

pub const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

#[inline]
pub fn erf(y: f64) -> f64 {
    libm::erf(y)
}

#[inline]
pub fn erfc(y: f64) -> f64 {
    libm::erfc(y)
}

/// Derivative of `erf`.
#[inline]
pub fn erf_prime(y: f64) -> f64 {
    TWO_OVER_SQRT_PI * (-y * y).exp()
}

/// Inverse of `erf` on `(0, 1)`.
pub fn erf_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "erf_inv expects p in (0, 1), got {p}"
        )));
    }
    Ok(erf_inv_signed(p))
}

/// Inverse of `erf` on `(-1, 1)`, no argument checking.
pub(crate) fn erf_inv_signed(p: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    if p < 0.0 {
        return -erf_inv_signed(-p);
    }
    let mut y = giles_initial(p);
    // Residual through erfc on the upper half keeps 1 - p exact.
    for _ in 0..6 {
        let r = if p > 0.5 {
            (1.0 - p) - erfc(y)
        } else {
            erf(y) - p
        };
        let d = erf_prime(y);
        if d == 0.0 {
            break;
        }
        // Halley correction; erf'' = -2y erf'.
        let step = r / d;
        let y_next = y - step / (1.0 + y * step);
        let done = (y_next - y).abs() <= 1e-16 * y.abs().max(1e-300);
        y = y_next;
        if done {
            break;
        }
    }
    y
}

// Single-precision rational start (M. Giles, "Approximating the erfinv function").
fn giles_initial(x: f64) -> f64 {
    let mut w = -((1.0 - x) * (1.0 + x)).ln();
    let p = if w < 5.0 {
        w -= 2.5;
        let mut p = 2.810_226_36e-08;
        p = 3.432_739_39e-07 + p * w;
        p = -3.523_387_7e-06 + p * w;
        p = -4.391_506_54e-06 + p * w;
        p = 0.000_218_580_87 + p * w;
        p = -0.001_253_725_03 + p * w;
        p = -0.004_177_681_64 + p * w;
        p = 0.246_640_727 + p * w;
        1.501_409_41 + p * w
    } else {
        w = w.sqrt() - 3.0;
        let mut p = -0.000_200_214_257;
        p = 0.000_100_950_558 + p * w;
        p = 0.001_349_343_22 + p * w;
        p = -0.003_673_428_44 + p * w;
        p = 0.005_739_507_73 + p * w;
        p = -0.007_622_461_3 + p * w;
        p = 0.009_438_870_47 + p * w;
        p = 1.001_674_06 + p * w;
        2.832_976_82 + p * w
    };
    p * x
}

/// Inverse of `erf` by plain bisection; slow, used for cross-checks.
pub fn erf_inv_bisect(p: f64, tol: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "erf_inv expects p in (0, 1), got {p}"
        )));
    }
    let mut hi = 1.0;
    while erf(hi) < p {
        hi *= 2.0;
    }
    crate::numerics::roots::bisect(|y| erf(y) - p, 0.0, hi, tol, 0.0)
}
