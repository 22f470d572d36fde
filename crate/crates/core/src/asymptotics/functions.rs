//! Scalar ingredients of the front asymptotics: the logistic rate `F`,
//! its reciprocal integral, and the scaled error function `E`.

use crate::error::{Error, Result};
use crate::numerics::{quad, special};

/// `F(x) = 1/4 - (x_hi - x)^2`.
pub fn eval_f(x: f64, x_hi: f64) -> f64 {
    0.25 - (x_hi - x) * (x_hi - x)
}

fn check_range(a: f64, b: f64, x_hi: f64) -> Result<()> {
    let ok = |x: f64| x.is_finite() && (x - x_hi).abs() < 0.5;
    if !ok(a) || !ok(b) {
        return Err(Error::Domain(format!(
            "1/F integral over [{a}, {b}] reaches a zero of F (x_hi = {x_hi})"
        )));
    }
    Ok(())
}

/// `∫_a^b dx / F(x)` from the antiderivative `ln((1/2 + u)/(1/2 - u))`, `u = x - x_hi`.
pub fn inv_f_integral(a: f64, b: f64, x_hi: f64) -> Result<f64> {
    check_range(a, b, x_hi)?;
    Ok(2.0 * (2.0 * (b - x_hi)).atanh() - 2.0 * (2.0 * (a - x_hi)).atanh())
}

/// Same integral by adaptive quadrature.
pub fn inv_f_integral_quad(a: f64, b: f64, x_hi: f64) -> Result<f64> {
    check_range(a, b, x_hi)?;
    quad::integrate(|x| 1.0 / eval_f(x, x_hi), a, b, 1e-14)
}

fn check_domain(x_lo: f64, x_hi: f64) -> Result<()> {
    if !(x_lo > 0.0 && x_lo < x_hi && x_hi < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < x_lo < x_hi < 1/2, got x_lo = {x_lo}, x_hi = {x_hi}"
        )));
    }
    Ok(())
}

/// `F̄ = 2 ∫_0^{x_hi} dx/F`, the time of flight of `w` across the whole band.
pub fn f_bar(x_hi: f64) -> Result<f64> {
    if !(x_hi > 0.0 && x_hi < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < x_hi < 1/2, got {x_hi}"
        )));
    }
    Ok(2.0 * inv_f_integral(0.0, x_hi, x_hi)?)
}

/// `∫_0^{x_hi + x_lo} dx/F`.
pub fn s_half(x_lo: f64, x_hi: f64) -> Result<f64> {
    check_domain(x_lo, x_hi)?;
    inv_f_integral(0.0, x_hi + x_lo, x_hi)
}

/// `E(y) = 2/√π ∫_0^y e^{-z²} dz`, extended oddly to negative `y`.
pub fn erf_e(y: f64) -> f64 {
    special::erf(y)
}

pub fn erf_e_inv(p: f64) -> Result<f64> {
    special::erf_inv(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_values() {
        assert_eq!(eval_f(0.25, 0.25), 0.25);
        assert!((eval_f(0.0, 0.25) - 0.1875).abs() < 1e-16);
        assert!(eval_f(0.25 - 0.5, 0.25).abs() < 1e-16);
    }

    #[test]
    fn inv_f_anchor_values() {
        assert!((inv_f_integral(0.0, 0.25, 0.25).unwrap() - 3f64.ln()).abs() < 1e-14);
        assert_eq!(inv_f_integral(0.1, 0.1, 0.25).unwrap(), 0.0);
        let v = inv_f_integral(0.0, 0.26, 0.25).unwrap();
        assert!((v - (3f64.ln() + (51.0f64 / 49.0).ln())).abs() < 1e-14);
        assert!((v - 1.1386176).abs() < 1e-7);
        assert!(inv_f_integral(0.0, 0.75, 0.25).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for &(a, b) in &[(0.0, 0.25), (-0.2, 0.7), (0.3, 0.1)] {
            let c = inv_f_integral(a, b, 0.25).unwrap();
            let q = inv_f_integral_quad(a, b, 0.25).unwrap();
            assert!((c - q).abs() < 1e-11, "{a} {b}: {c} vs {q}");
        }
    }

    #[test]
    fn band_times() {
        assert!((f_bar(0.25).unwrap() - 2.0 * 3f64.ln()).abs() < 1e-14);
        assert!((s_half(0.01, 0.25).unwrap() - 1.1386176).abs() < 1e-7);
        assert!(s_half(0.3, 0.25).is_err());
        for &(lo, hi) in &[(0.01, 0.25), (0.1, 0.11), (0.2, 0.45), (0.001, 0.499)] {
            assert!(f_bar(hi).unwrap() > s_half(lo, hi).unwrap());
        }
    }

    #[test]
    fn e_and_inverse() {
        assert_eq!(erf_e(0.0), 0.0);
        assert!((erf_e(0.5) - 0.520499877813).abs() < 1e-12);
        assert!((erf_e_inv(0.5).unwrap() - 0.476936276204).abs() < 1e-12);
        for p in [1e-9, 0.3, 0.5, 0.9, 1.0 - 1e-12] {
            assert!((erf_e(erf_e_inv(p).unwrap()) - p).abs() < 1e-13);
        }
        assert!(erf_e_inv(1.0).is_err());
        assert!(erf_e_inv(0.0).is_err());
    }
}
