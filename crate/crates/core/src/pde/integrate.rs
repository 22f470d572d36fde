use crate::error::{Error, Result};
use crate::hysteresis::{total_mass, ThresholdDensity};
use crate::numerics::special::erf;
use crate::pde::params::ModelParams;
use crate::pde::scheme::{step, RelayCache};
use crate::pde::state::{SystemState, Variables};
use crate::trace::{FrontTracker, Snapshot, Trace, TraceRow};

/// Growth of the step size after an event-free step.
const GROWTH: f64 = 1.2;

fn row(s: &SystemState) -> TraceRow {
    TraceRow {
        t: s.t,
        v: s.v,
        w: s.w,
        u_total: s.total_mass(),
        p: s.moment(),
        config: s.config.clone(),
    }
}

fn snapshot(s: &SystemState) -> Snapshot {
    let d = &s.density;
    Snapshot {
        t: s.t,
        x: (0..d.values().len()).map(|i| d.node(i)).collect(),
        u: d.values().to_vec(),
    }
}

/// Runs from `t = 0` to `T` and returns the sampled trace with all events.
pub fn integrate(params: &ModelParams) -> Result<Trace> {
    run(params, Variables::Transformed).map(|(trace, _)| trace)
}

/// Same as [`integrate`] but for the two-nutrient form of the model.
pub fn simulate_original(params: &ModelParams) -> Result<Trace> {
    run(params, Variables::Original).map(|(trace, _)| trace)
}

/// Integrates and also returns the final state.
pub fn run(params: &ModelParams, vars: Variables) -> Result<(Trace, SystemState)> {
    params.validate()?;
    let mut state = SystemState::initial(params, vars)?;
    let mut trace = Trace::new(params.x_lo, params.x_hi);
    let mut tracker = FrontTracker::new();
    let mut cache = RelayCache::default();
    trace.min_density = state.density.min();
    trace.rows.push(row(&state));
    let mut snaps: Vec<f64> = params.snapshot_times.clone();
    snaps.sort_by(f64::total_cmp);
    snaps.dedup();
    let mut snap_idx = 0;
    while snap_idx < snaps.len() && snaps[snap_idx] <= 0.0 {
        trace.snapshots.push(snapshot(&state));
        snap_idx += 1;
    }
    let t_end = params.t_end;
    let mut sample_k: u64 = 1;
    let mut dt = params.dt_max;
    let w_bound = params.x_hi + 1e-8;
    while state.t < t_end {
        let next_sample = (sample_k as f64 * params.sample_dt).min(t_end);
        let mut target = next_sample;
        if snap_idx < snaps.len() {
            target = target.min(snaps[snap_idx]);
        }
        let mut h = dt.min(params.dt_max);
        let mut landing = false;
        if state.t + h >= target * (1.0 - 1e-15) {
            h = target - state.t;
            landing = true;
        }
        if !(h > 0.0) {
            // Target already reached through rounding.
            h = f64::EPSILON * state.t.max(1.0);
        }
        let out = step(&state, h, params, &mut cache)?;
        let mut next = out.state;
        let hit_target = landing && out.event.is_none();
        if hit_target {
            next.t = target;
        }
        tracker.observe(
            state.w,
            next.t,
            next.w,
            &state.config,
            &next.config,
            &mut trace.events,
        );
        if out.event.is_some() {
            dt = (0.5 * h).max(crate::pde::scheme::EVENT_TOL);
        } else if !landing {
            dt = (h * GROWTH).min(params.dt_max);
        }
        state = next;
        if state.w.abs() > w_bound {
            return Err(Error::Invariant(format!(
                "|w| = {} exceeds x_hi at t = {}",
                state.w.abs(),
                state.t
            )));
        }
        trace.min_density = trace.min_density.min(state.density.min());
        while snap_idx < snaps.len() && state.t >= snaps[snap_idx] {
            trace.snapshots.push(snapshot(&state));
            snap_idx += 1;
        }
        if state.t >= next_sample {
            trace.rows.push(row(&state));
            while (sample_k as f64) * params.sample_dt <= state.t {
                sample_k += 1;
            }
        }
    }
    if trace.rows.last().map(|r| r.t) != Some(state.t) {
        trace.rows.push(row(&state));
    }
    Ok((trace, state))
}

/// Result of the long-time bound checks on one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub max_mass_drop: f64,
    pub max_v_rise: f64,
    /// Largest `v / (v0 e^{-μ t})`.
    pub max_v_ratio: f64,
    pub max_abs_w: f64,
    pub min_density: f64,
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks monotone mass, monotone nutrient with exponential bound, `|w| ≤ x_hi`
/// and nonnegative density on every sampled row.
pub fn check_invariants(trace: &Trace, params: &ModelParams) -> InvariantReport {
    let mut rep = InvariantReport {
        max_mass_drop: 0.0,
        max_v_rise: 0.0,
        max_v_ratio: 0.0,
        max_abs_w: 0.0,
        min_density: trace.min_density,
        violations: Vec::new(),
    };
    let mu = params.mu();
    for (i, r) in trace.rows.iter().enumerate() {
        rep.max_abs_w = rep.max_abs_w.max(r.w.abs());
        if params.v0 > 0.0 {
            rep.max_v_ratio = rep.max_v_ratio.max(r.v / (params.v0 * (-mu * r.t).exp()));
        } else if r.v > 0.0 {
            rep.max_v_ratio = f64::INFINITY;
        }
        if i > 0 {
            let prev = &trace.rows[i - 1];
            rep.max_mass_drop = rep.max_mass_drop.max(prev.u_total - r.u_total);
            rep.max_v_rise = rep.max_v_rise.max(r.v - prev.v);
        }
    }
    if rep.max_mass_drop > 1e-9 {
        rep.violations
            .push(format!("total mass decreased by {:e}", rep.max_mass_drop));
    }
    if rep.max_v_rise > 0.0 {
        rep.violations
            .push(format!("nutrient increased by {:e}", rep.max_v_rise));
    }
    if rep.max_v_ratio > 1.0 + 1e-6 {
        rep.violations.push(format!(
            "nutrient exceeds exponential bound by factor {}",
            rep.max_v_ratio
        ));
    }
    if rep.max_abs_w > params.x_hi + 1e-8 {
        rep.violations
            .push(format!("|w| reached {}", rep.max_abs_w));
    }
    if rep.min_density < -1e-12 {
        rep.violations
            .push(format!("density reached {:e}", rep.min_density));
    }
    rep
}

/// `sup_i |U(x_i, t) - E((x_hi - x_i)/(2√(D t)))|` and whether `t` lies in the
/// window `t ≥ s_{1/2}/2` where the Gaussian approximation is meant to hold.
pub fn gaussian_tail_diagnostic(state: &SystemState, params: &ModelParams) -> Result<(f64, bool)> {
    let t = state.t;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("diagnostic needs t > 0, got {t}")));
    }
    let s_half = crate::asymptotics::s_half(params.x_lo, params.x_hi)?;
    Ok((
        tail_distance(&state.density, params.x_hi, params.d, t),
        t >= 0.5 * s_half,
    ))
}

pub(crate) fn tail_distance(density: &ThresholdDensity, x_hi: f64, d: f64, t: f64) -> f64 {
    let m = density.values().len();
    let scale = 2.0 * (d * t).sqrt();
    // Accumulate the tail from the top node down.
    let v = density.values();
    let h = density.h();
    let mut tail = 0.0;
    let mut worst: f64 = (0.0 - erf(0.0)).abs();
    for i in (0..m - 1).rev() {
        tail += 0.5 * h * (v[i] + v[i + 1]);
        let x = density.node(i);
        worst = worst.max((tail - erf((x_hi - x) / scale)).abs());
    }
    debug_assert!((tail - total_mass(density)).abs() < 1e-9 * tail.max(1.0));
    worst
}
