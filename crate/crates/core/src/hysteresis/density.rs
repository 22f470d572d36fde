use crate::error::{Error, Result};
use crate::hysteresis::config::SimpleConfiguration;

/// Samples of `u` on a uniform grid over `[x_lo, x_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdDensity {
    x_lo: f64,
    x_hi: f64,
    values: Vec<f64>,
}

impl ThresholdDensity {
    pub fn new(x_lo: f64, x_hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(x_lo < x_hi) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bad density domain [{x_lo}, {x_hi}]"
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidParameter(
                "density needs at least two nodes".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite density sample {v}"
            )));
        }
        Ok(Self { x_lo, x_hi, values })
    }

    /// Samples `f` at the `m + 1` nodes.
    pub fn from_fn(x_lo: f64, x_hi: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=m).map(|i| f(node(x_lo, x_hi, m, i))).collect();
        Self::new(x_lo, x_hi, values)
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    /// Number of cells.
    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.cells() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        node(self.x_lo, self.x_hi, self.cells(), i)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Trapezoid weights `∫ φ_i`.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.h();
        let mut w = vec![h; self.values.len()];
        w[0] = 0.5 * h;
        *w.last_mut().unwrap() = 0.5 * h;
        w
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn node(x_lo: f64, x_hi: f64, m: usize, i: usize) -> f64 {
    if i == m {
        x_hi
    } else {
        x_lo + (x_hi - x_lo) * (i as f64 / m as f64)
    }
}

pub fn total_mass(density: &ThresholdDensity) -> f64 {
    let v = &density.values;
    let n = v.len();
    let inner: f64 = v[1..n - 1].iter().sum();
    density.h() * (inner + 0.5 * (v[0] + v[n - 1]))
}

/// `∫_x^{x_hi} u` for the piecewise-linear interpolant.
pub fn tail_mass(density: &ThresholdDensity, x: f64) -> Result<f64> {
    if !(x >= density.x_lo && x <= density.x_hi) {
        return Err(Error::Domain(format!(
            "tail mass position {x} outside [{}, {}]",
            density.x_lo, density.x_hi
        )));
    }
    let m = density.cells();
    let h = density.h();
    let k = (((x - density.x_lo) / h).floor() as usize).min(m - 1);
    let v = &density.values;
    let xk = density.node(k);
    let xk1 = density.node(k + 1);
    // Linear interpolant on the partial cell [x, x_{k+1}].
    let ux = v[k] + (v[k + 1] - v[k]) * ((x - xk) / (xk1 - xk)).clamp(0.0, 1.0);
    let partial = 0.5 * (ux + v[k + 1]) * (xk1 - x).max(0.0);
    let rest: f64 = if k + 1 < m {
        let inner: f64 = v[k + 2..m].iter().sum();
        h * (inner + 0.5 * (v[k + 1] + v[m]))
    } else {
        0.0
    };
    Ok(partial + rest)
}

/// Adds `scale * ∫_a^b φ_i` to `out[i]` for the hat basis of the grid.
fn add_hat_integrals(x_lo: f64, x_hi: f64, m: usize, a: f64, b: f64, scale: f64, out: &mut [f64]) {
    if b <= a {
        return;
    }
    let h = (x_hi - x_lo) / m as f64;
    let k0 = (((a - x_lo) / h).floor().max(0.0) as usize).min(m - 1);
    let k1 = (((b - x_lo) / h).ceil().max(1.0) as usize).min(m);
    for k in k0..k1 {
        let xk = node(x_lo, x_hi, m, k);
        let xk1 = node(x_lo, x_hi, m, k + 1);
        let lo = a.max(xk);
        let hi = b.min(xk1);
        if hi <= lo {
            continue;
        }
        let hk = xk1 - xk;
        out[k] += scale * ((xk1 - lo).powi(2) - (xk1 - hi).powi(2)) / (2.0 * hk);
        out[k + 1] += scale * ((hi - xk).powi(2) - (lo - xk).powi(2)) / (2.0 * hk);
    }
}

/// Node coefficients `c_i = ∫ φ_i r` so that `P = Σ c_i u_i` exactly for the
/// piecewise-linear interpolant of `u`. Cells containing a front are split there.
pub fn relay_coefficients(density: &ThresholdDensity, config: &SimpleConfiguration) -> Vec<f64> {
    let m = density.cells();
    let mut c = vec![0.0; m + 1];
    for (a, b, s) in config.intervals() {
        add_hat_integrals(density.x_lo, density.x_hi, m, a, b, s.value(), &mut c);
    }
    c
}

pub fn preisach_moment(density: &ThresholdDensity, config: &SimpleConfiguration) -> f64 {
    relay_coefficients(density, config)
        .iter()
        .zip(&density.values)
        .map(|(c, u)| c * u)
        .sum()
}
