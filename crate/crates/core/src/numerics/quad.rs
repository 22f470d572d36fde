//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Default subdivision cap.
pub const MAX_INTERVALS: usize = 1_000_000;

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Piece {
        a,
        b,
        value: kron * h,
        err: ((kron - gauss) * h).abs(),
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    integrate_capped(f, a, b, abs_tol, MAX_INTERVALS)
}

pub fn integrate_capped<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "non-finite integration limits [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_capped(f, b, a, abs_tol, max_intervals).map(|v| -v);
    }
    let first = gk15(&mut f, a, b);
    let mut total = first.value;
    let mut total_err = first.err;
    // Pieces too narrow to split further are parked here.
    let mut settled_err = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut count = 1usize;
    while total_err > abs_tol {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-15 * mid.abs() {
            settled_err += worst.err;
            if settled_err > abs_tol {
                return Err(Error::Quadrature(format!(
                    "round-off floor {settled_err:e} exceeds tolerance {abs_tol:e} on [{a}, {b}]"
                )));
            }
            continue;
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        if !total.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        heap.push(left);
        heap.push(right);
        count += 1;
        if count >= max_intervals {
            return Err(Error::Quadrature(format!(
                "subdivision cap {max_intervals} reached on [{a}, {b}], error estimate {total_err:e}"
            )));
        }
        // Periodically resum to keep running totals free of drift.
        if count % 4096 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum::<f64>() + settled_err;
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-14).unwrap();
        assert!((v - 8.0).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits() {
        let v = integrate(|x| x.exp(), 1.0, 0.0, 1e-13).unwrap();
        assert!((v + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_integral() {
        let v = integrate(|z| (-z * z).exp(), 0.0, 0.5, 1e-14).unwrap();
        let e = v * std::f64::consts::FRAC_2_SQRT_PI;
        assert!((e - 0.520_499_877_813_046_5).abs() < 1e-14);
    }

    #[test]
    fn peaked_integrand() {
        // 1/(1/4 - u^2) close to its pole
        let v = integrate(|u| 1.0 / (0.25 - u * u), 0.0, 0.499, 1e-12).unwrap();
        let exact = (0.999f64 / 0.001).ln();
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn cap_reports_error() {
        let r = integrate_capped(|x| (1.0 / x).sin(), 1e-8, 1.0, 1e-14, 50);
        assert!(matches!(r, Err(Error::Quadrature(_))));
    }
}
