use crate::error::{Error, Result};
use crate::numerics::roots::bisect;
use crate::numerics::special::{erf, erf_inv, erf_prime};

/// Pairs `(s_j, y_j)`, `j < n`, defining
/// `G_n(t) = 2 Σ_j (-1)^{n+j} E(y_j √(s_j/t))`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GCoefficients {
    pairs: Vec<(f64, f64)>,
}

impl GCoefficients {
    /// `G_1 ≡ 0`.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(s, y)) in pairs.iter().enumerate() {
            if !(s > 0.0 && s.is_finite() && y > 0.0 && y.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "bad coefficient pair ({s}, {y})"
                )));
            }
            if i > 0 && pairs[i - 1].0 >= s {
                return Err(Error::InvalidParameter(
                    "s_j must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { pairs })
    }

    /// Index `n` of the function these pairs define.
    pub fn n(&self) -> usize {
        self.pairs.len() + 1
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// `s_{n-1}`, zero for `n = 1`.
    pub fn s_prev(&self) -> f64 {
        self.pairs.last().map_or(0.0, |p| p.0)
    }

    pub fn push(&mut self, s: f64, y: f64) -> Result<()> {
        if !(s > self.s_prev() && y > 0.0 && y.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cannot extend with ({s}, {y})"
            )));
        }
        self.pairs.push((s, y));
        Ok(())
    }

    pub fn extended(&self, s: f64, y: f64) -> Result<Self> {
        let mut c = self.clone();
        c.push(s, y)?;
        Ok(c)
    }

    /// Direct sum. `t` must be positive.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.n();
        let mut g = 0.0;
        for (j, &(s, y)) in self.pairs.iter().enumerate() {
            let sign = if (n + j + 1) % 2 == 0 { 1.0 } else { -1.0 };
            g += sign * erf(y * (s / t).sqrt());
        }
        2.0 * g
    }

    /// Recursion `G_1 = 0`, `G_{k+1} = -G_k - 2E(y_k √(s_k/t))`.
    pub fn eval_recursive(&self, t: f64) -> f64 {
        self.pairs
            .iter()
            .fold(0.0, |g, &(s, y)| -g - 2.0 * erf(y * (s / t).sqrt()))
    }

    /// `dG_n/dt`.
    pub fn derivative(&self, t: f64) -> f64 {
        let n = self.n();
        let mut d = 0.0;
        for (j, &(s, y)) in self.pairs.iter().enumerate() {
            let sign = if (n + j + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let arg = y * (s / t).sqrt();
            d += sign * erf_prime(arg) * (-0.5 * arg / t);
        }
        2.0 * d
    }

    /// `H_n(t, z) = -G_n(t) - 2E(z/√t) + 1`.
    pub fn eval_h(&self, t: f64, z: f64) -> Result<f64> {
        check_t(t)?;
        let base = 1.0 - self.eval(t);
        check_base(base, t)?;
        Ok(base - 2.0 * erf(z / t.sqrt()))
    }

    /// The root `z > 0` of `H_n(t, ·)`: `√t · E⁻¹((1 - G_n(t))/2)`.
    pub fn solve_z(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        let base = 1.0 - self.eval(t);
        check_base(base, t)?;
        Ok(t.sqrt() * erf_inv(0.5 * base)?)
    }

    /// Root of `H_n(t, ·)` by bisection, independent of the inverse error function.
    pub fn solve_z_bisect(&self, t: f64, rel_tol: f64) -> Result<f64> {
        let h = |z: f64| self.eval_h(t, z).unwrap_or(f64::NAN);
        let lo = 0.0;
        let mut hi = t.sqrt();
        while h(hi) > 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NoBracket(format!("H_n({t}, z) stays positive")));
            }
        }
        // H decreases in z, so bisect on -H.
        bisect(|z| -h(z), lo, hi, rel_tol, 0.0)
    }

    /// `dZ_n/dt` from the closed form.
    pub fn solve_z_derivative(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        let base = 1.0 - self.eval(t);
        check_base(base, t)?;
        let y = erf_inv(0.5 * base)?;
        let dy = -0.5 * self.derivative(t) / erf_prime(y);
        Ok(0.5 * y / t.sqrt() + t.sqrt() * dy)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("G_n needs t > 0, got {t}")));
    }
    Ok(())
}

fn check_base(base: f64, t: f64) -> Result<()> {
    if !(base > 0.0 && base < 2.0) {
        return Err(Error::Invariant(format!(
            "1 - G_n({t}) = {base} left (0, 2)"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const Y1: f64 = 0.476_936_276_204_469_9;

    fn g2() -> GCoefficients {
        GCoefficients::from_pairs(vec![(2.0 * 3f64.ln(), Y1)]).unwrap()
    }

    #[test]
    fn basis_values() {
        let g1 = GCoefficients::new();
        assert_eq!(g1.eval(3.0), 0.0);
        let g = g2();
        let s1 = 2.0 * 3f64.ln();
        assert!((g.eval(s1) + 1.0).abs() < 1e-15);
        // Leading order: G_2(t) ≈ -4 y_1 √(s_1/t) / √π.
        let lead = -4.0 * Y1 * 1e-4 / std::f64::consts::PI.sqrt();
        assert!((g.eval(1e8 * s1) - lead).abs() < 1e-11);
        assert!(g.eval(1e16 * s1).abs() < 1e-6);
    }

    #[test]
    fn direct_matches_recursion() {
        let g = GCoefficients::from_pairs(vec![(1.0, 0.4), (3.0, 0.8), (7.5, 1.1), (20.0, 1.3)])
            .unwrap();
        for t in [0.5, 1.0, 4.0, 30.0, 1e4] {
            assert!((g.eval(t) - g.eval_recursive(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let g = GCoefficients::from_pairs(vec![
            (2.197_224_577_336_219_6, Y1),
            (9.130_821_131_328_278, 0.829_530_205_167_526),
            (24.028_662_703_132_157, 1.067_311_769_627_473_4),
        ])
        .unwrap();
        for t in [60.0, 90.0, 500.0] {
            let h = 1e-5 * t;
            let fd = (g.eval(t + h) - g.eval(t - h)) / (2.0 * h);
            assert!((fd - g.derivative(t)).abs() < 1e-9);
            let fz = (g.solve_z(t + h).unwrap() - g.solve_z(t - h).unwrap()) / (2.0 * h);
            assert!((fz - g.solve_z_derivative(t).unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn z_is_root_of_h() {
        let g = g2();
        for t in [10.0, 18.0, 100.0] {
            let z = g.solve_z(t).unwrap();
            assert!(z > 0.0);
            assert!(g.eval_h(t, z).unwrap().abs() < 1e-11);
            assert!((g.solve_z_bisect(t, 1e-14).unwrap() - z).abs() < 1e-12 * z);
            assert!((g.eval_h(t, 0.0).unwrap() - (1.0 - g.eval(t))).abs() < 1e-15);
        }
        assert!((g.solve_z(1e12).unwrap() / 1e6 - Y1).abs() < 1e-6);
        assert!(g.eval(0.0).is_nan() || g.solve_z(0.0).is_err());
    }
}
