use crate::error::Result;
use crate::hysteresis::{preisach_moment, total_mass, SimpleConfiguration, ThresholdDensity};
use crate::pde::params::ModelParams;

/// Which form of the nutrient equations is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variables {
    /// Total nutrient `v` and concentration deviation `w`.
    Transformed,
    /// The two nutrient amounts `f_1`, `f_{-1}`.
    Original,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub t: f64,
    pub density: ThresholdDensity,
    pub v: f64,
    pub w: f64,
    pub config: SimpleConfiguration,
    /// `(f_1, f_{-1})` when integrating the original variables.
    pub nutrients: Option<(f64, f64)>,
    pub w_running_max: f64,
    pub w_running_min: f64,
}

/// Below this total nutrient `w` is frozen and the reaction dropped.
pub const V_UNDERFLOW: f64 = 1e-300;

impl SystemState {
    pub fn initial(params: &ModelParams, vars: Variables) -> Result<Self> {
        params.validate()?;
        let mut config = params.r0.clone();
        config.apply_input(params.w0);
        let nutrients = match vars {
            Variables::Transformed => None,
            Variables::Original => {
                Some(((0.5 + params.w0) * params.v0, (0.5 - params.w0) * params.v0))
            }
        };
        Ok(Self {
            t: 0.0,
            density: params.initial_density()?,
            v: params.v0,
            w: params.w0,
            config,
            nutrients,
            w_running_max: params.w0,
            w_running_min: params.w0,
        })
    }

    pub fn variables(&self) -> Variables {
        if self.nutrients.is_some() {
            Variables::Original
        } else {
            Variables::Transformed
        }
    }

    pub fn total_mass(&self) -> f64 {
        total_mass(&self.density)
    }

    pub fn moment(&self) -> f64 {
        preisach_moment(&self.density, &self.config)
    }

    pub fn frozen(&self) -> bool {
        self.v < V_UNDERFLOW
    }
}
