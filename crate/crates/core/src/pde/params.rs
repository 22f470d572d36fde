use crate::error::{Error, Result};
use crate::hysteresis::{Sign, SimpleConfiguration, ThresholdDensity};

/// Shape of the initial density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum U0Profile {
    /// Gaussian centered at `x_hi`, truncated to the band.
    Gaussian {
        sigma: f64,
    },
    Uniform,
}

impl U0Profile {
    pub fn name(&self) -> &'static str {
        match self {
            U0Profile::Gaussian { .. } => "gaussian",
            U0Profile::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub x_lo: f64,
    pub x_hi: f64,
    pub d: f64,
    pub v0: f64,
    pub w0: f64,
    pub u0: U0Profile,
    pub r0: SimpleConfiguration,
    pub t_end: f64,
    /// Number of grid cells.
    pub m: usize,
    pub dt_max: f64,
    /// Spacing of recorded trace rows.
    pub sample_dt: f64,
    /// Times at which full `u` profiles are stored.
    pub snapshot_times: Vec<f64>,
}

/// Default width of the initial Gaussian, `D^{3/4}`.
pub fn default_sigma(d: f64) -> f64 {
    d.powf(0.75)
}

/// `min(0.2 h² / D, 1e-2)`.
pub fn default_dt_max(x_lo: f64, x_hi: f64, m: usize, d: f64) -> f64 {
    let h = (x_hi - x_lo) / m as f64;
    (0.2 * h * h / d).min(1e-2)
}

impl ModelParams {
    /// Small-diffusion defaults: `v0 = √D`, `w0 = x_hi - D^{1/4}`, all relays on,
    /// a Gaussian of width `D^{3/4}` at the top of the band, `M = 400`.
    pub fn with_defaults(x_lo: f64, x_hi: f64, d: f64, t_end: f64) -> Result<Self> {
        let m = 400;
        let p = Self {
            x_lo,
            x_hi,
            d,
            v0: d.sqrt(),
            w0: x_hi - d.powf(0.25),
            u0: U0Profile::Gaussian {
                sigma: default_sigma(d),
            },
            r0: SimpleConfiguration::uniform(x_lo, x_hi, Sign::Plus)?,
            t_end,
            m,
            dt_max: default_dt_max(x_lo, x_hi, m, d),
            sample_dt: t_end / 1000.0,
            snapshot_times: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.x_lo > 0.0 && self.x_lo < self.x_hi && self.x_hi < 0.5) {
            return bad(format!(
                "need 0 < x_lo < x_hi < 1/2, got [{}, {}]",
                self.x_lo, self.x_hi
            ));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return bad(format!("D must be positive, got {}", self.d));
        }
        if !(self.v0 >= 0.0 && self.v0.is_finite()) {
            return bad(format!("v0 must be nonnegative, got {}", self.v0));
        }
        if !(self.w0.abs() <= self.x_hi) {
            return bad(format!("|w0| must not exceed x_hi, got {}", self.w0));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("T must be positive, got {}", self.t_end));
        }
        if self.m < 2 {
            return bad(format!("M must be at least 2, got {}", self.m));
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return bad(format!("dt_max must be positive, got {}", self.dt_max));
        }
        if !(self.sample_dt > 0.0) {
            return bad(format!(
                "sample spacing must be positive, got {}",
                self.sample_dt
            ));
        }
        if self.r0.x_lo() != self.x_lo || self.r0.x_hi() != self.x_hi {
            return bad("initial configuration domain differs from [x_lo, x_hi]".into());
        }
        if let U0Profile::Gaussian { sigma } = self.u0 {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return bad(format!("u0 width must be positive, got {sigma}"));
            }
        }
        if self
            .snapshot_times
            .iter()
            .any(|&t| !(0.0..=self.t_end).contains(&t))
        {
            return bad("snapshot times must lie in [0, T]".into());
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.m as f64
    }

    /// `μ = 1/2 - x_hi`, the guaranteed nutrient decay rate.
    pub fn mu(&self) -> f64 {
        0.5 - self.x_hi
    }

    /// Initial density with unit trapezoid mass.
    pub fn initial_density(&self) -> Result<ThresholdDensity> {
        let (lo, hi) = (self.x_lo, self.x_hi);
        let mut dens = match self.u0 {
            U0Profile::Uniform => ThresholdDensity::from_fn(lo, hi, self.m, |_| 1.0)?,
            U0Profile::Gaussian { sigma } => ThresholdDensity::from_fn(lo, hi, self.m, |x| {
                (-(x - hi).powi(2) / (2.0 * sigma * sigma)).exp()
            })?,
        };
        let mass = crate::hysteresis::total_mass(&dens);
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(
                "initial density has no mass on the grid".into(),
            ));
        }
        for u in dens.values_mut() {
            *u /= mass;
        }
        Ok(dens)
    }
}
