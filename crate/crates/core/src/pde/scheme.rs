//! One IMEX step of the coupled system and event localization.
//!
//! Reaction: with the relay field frozen at the step start, each node grows by
//! the exact factor `exp(dt · v · (1/2 + w r̃_i))`, where `r̃_i = c_i / ω_i` is the
//! cell-averaged relay sign (`c_i = ∫ φ_i r`, `ω_i = ∫ φ_i`). The nutrient loses
//! exactly the biomass gained, and `w` follows the closed-form solution of its
//! equation with `P` frozen. Diffusion is Crank-Nicolson with ghost-node
//! Neumann closure, which conserves trapezoid mass.

use crate::error::{Error, Result};
use crate::hysteresis::{config_evolve, relay_coefficients, SimpleConfiguration};
use crate::numerics::roots::bisect_predicate;
use crate::numerics::tridiag;
use crate::pde::params::ModelParams;
use crate::pde::state::{SystemState, V_UNDERFLOW};

/// Time resolution of event localization.
pub const EVENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepEvent {
    /// `w` reached the given level.
    Level(f64),
    /// The Preisach moment changed sign, so `w` turned around.
    Turn,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: SystemState,
    pub dt: f64,
    pub event: Option<StepEvent>,
}

/// Relay coefficients for one configuration, kept until the configuration changes.
#[derive(Debug, Clone, Default)]
pub struct RelayCache {
    key: Option<SimpleConfiguration>,
    coeffs: Vec<f64>,
}

impl RelayCache {
    pub fn coefficients(&mut self, state: &SystemState) -> &[f64] {
        if self.key.as_ref() != Some(&state.config)
            || self.coeffs.len() != state.density.values().len()
        {
            self.coeffs = relay_coefficients(&state.density, &state.config);
            self.key = Some(state.config.clone());
        }
        &self.coeffs
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Crank-Nicolson step of `u_t = D u_xx` with zero-flux ends.
pub fn diffuse(u: &mut [f64], d: f64, h: f64, dt: f64) -> Result<()> {
    let n = u.len();
    let lam = d * dt / (h * h);
    let mut rhs = vec![0.0; n];
    rhs[0] = u[0] + lam * (u[1] - u[0]);
    for i in 1..n - 1 {
        rhs[i] = u[i] + 0.5 * lam * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
    }
    rhs[n - 1] = u[n - 1] + lam * (u[n - 2] - u[n - 1]);
    let diag = vec![1.0 + lam; n];
    let mut lower = vec![-0.5 * lam; n];
    let mut upper = vec![-0.5 * lam; n];
    upper[0] = -lam;
    lower[n - 1] = -lam;
    tridiag::solve(&lower, &diag, &upper, &rhs, u)
}

/// Advances by `dt` without looking for events.
pub fn raw_step(
    s: &SystemState,
    dt: f64,
    params: &ModelParams,
    cache: &mut RelayCache,
) -> Result<SystemState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let mut next = s.clone();
    next.t = s.t + dt;
    if !s.frozen() {
        let weights = s.density.weights();
        let c = cache.coefficients(s).to_vec();
        let u = s.density.values();
        let u_total = dot(&weights, u);
        let p0 = dot(&c, u);
        // Growth-rate prefactors: v/2 and w v for the transformed variables,
        // (f_1 + f_{-1})/2 and (f_1 - f_{-1})/2 for the original ones.
        let (base, tilt) = match s.nutrients {
            None => (0.5 * s.v, s.w * s.v),
            Some((f1, fm)) => (0.5 * (f1 + fm), 0.5 * (f1 - fm)),
        };
        let mut gained = 0.0;
        {
            let out = next.density.values_mut();
            for i in 0..out.len() {
                let rate = base + tilt * (c[i] / weights[i]);
                let du = u[i] * (dt * rate).exp_m1();
                out[i] = u[i] + du;
                gained += weights[i] * du;
            }
        }
        match s.nutrients {
            None => {
                next.v = s.v - gained;
                if next.v < 0.0 {
                    return Err(Error::Solver(format!(
                        "nutrient overdrawn at t = {} with dt = {dt}",
                        s.t
                    )));
                }
                next.w = 0.5 * ((2.0 * s.w).atanh() - 0.5 * p0 * dt).tanh();
            }
            Some((f1, fm)) => {
                let f1n = f1 * (-0.5 * dt * (u_total + p0)).exp();
                let fmn = fm * (-0.5 * dt * (u_total - p0)).exp();
                next.nutrients = Some((f1n, fmn));
                next.v = f1n + fmn;
                if next.v >= V_UNDERFLOW {
                    next.w = f1n / next.v - 0.5;
                }
            }
        }
    }
    diffuse(next.density.values_mut(), params.d, params.h(), dt)?;
    if next.w != s.w {
        next.config = config_evolve(&s.config, s.w, next.w)?;
    }
    next.w_running_max = s.w_running_max.max(next.w);
    next.w_running_min = s.w_running_min.min(next.w);
    Ok(next)
}

/// The first event, if any, between `s` and a trial state `n`.
fn detect(s: &SystemState, n: &SystemState, p_start: f64) -> Option<StepEvent> {
    let (lo, hi) = (s.config.x_lo(), s.config.x_hi());
    let crosses =
        |level: f64| level != s.w && ((s.w - level) * (n.w - level) < 0.0 || n.w == level);
    let fixed = [0.0, lo, -lo, hi, -hi];
    let fronts = s.config.fronts().iter().flat_map(|&f| [f, -f]);
    // Among crossed levels the nearest one to the start is hit first.
    let mut best: Option<f64> = None;
    for level in fixed.into_iter().chain(fronts) {
        if crosses(level) && best.is_none_or(|b| (level - s.w).abs() < (b - s.w).abs()) {
            best = Some(level);
        }
    }
    if let Some(level) = best {
        return Some(StepEvent::Level(level));
    }
    if !s.frozen() && p_start != 0.0 {
        let p1 = n.moment();
        if p1 == 0.0 || p1.signum() != p_start.signum() {
            return Some(StepEvent::Turn);
        }
    }
    None
}

/// Advances by at most `dt`, stopping just past the first event.
///
/// The event time is bisected to [`EVENT_TOL`] and the step is taken to the
/// upper end of the final bracket, so the returned state is already past it.
pub fn step(
    s: &SystemState,
    dt: f64,
    params: &ModelParams,
    cache: &mut RelayCache,
) -> Result<StepOutcome> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let trial = raw_step(s, dt, params, cache)?;
    let p_start = s.moment();
    if detect(s, &trial, p_start).is_none() {
        return Ok(StepOutcome {
            state: trial,
            dt,
            event: None,
        });
    }
    let mut failure = None;
    let theta = bisect_predicate(
        |th| match raw_step(s, th, params, cache) {
            Ok(n) => detect(s, &n, p_start).is_some(),
            Err(e) => {
                failure.get_or_insert(e);
                true
            }
        },
        0.0,
        dt,
        EVENT_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let state = raw_step(s, theta, params, cache)?;
    let event = detect(s, &state, p_start);
    Ok(StepOutcome {
        state,
        dt: theta,
        event,
    })
}
