//! Phase equations with the small remainders dropped.
//!
//! Each front `n` is produced by a rise of `p = x_hi ± w` from near zero to
//! `x_hi + x_lo`, driven by `G_n + 1`, followed by a fall of `q` from
//! `x_hi - x_lo` in which the running minimum `Q` of `q` marks the front.
//! Odd and even fronts differ only by the reflection `w ↦ -w`.

use crate::asymptotics::{eval_f, AsymptoticSchedule, GCoefficients};
use crate::error::{Error, Result};
use crate::hysteresis::{config_evolve, Sign, SimpleConfiguration};
use crate::numerics::ode::{Crossing, Dopri5, Event, Stop};
use crate::numerics::special::erf;
use crate::trace::{FrontTracker, Trace, TraceRow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedOptions {
    pub rtol: f64,
    pub atol: f64,
    /// The fall is abandoned at `horizon_factor * s_n`.
    pub horizon_factor: f64,
    /// Tolerance on `G_n(t_0) + 1` below zero at the start of a rise.
    pub start_tol: f64,
}

impl Default for ReducedOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            horizon_factor: 4.0,
            start_tol: 1e-9,
        }
    }
}

impl ReducedOptions {
    fn solver(&self) -> Dopri5 {
        Dopri5::with_tolerance(self.rtol, self.atol)
    }
}

#[derive(Debug, Clone)]
pub struct RiseResult {
    /// Time at which `p` reaches `x_hi + x_lo`.
    pub t_hit: f64,
    /// Accepted `(t, p)` points.
    pub samples: Vec<(f64, f64)>,
}

/// Integrates `ṗ = F(p)(G_n(t) + 1)` from `(t0, p0)` until `p = x_hi + x_lo`.
pub fn integrate_rise(
    coeffs: &GCoefficients,
    p0: f64,
    t0: f64,
    x_lo: f64,
    x_hi: f64,
    opts: &ReducedOptions,
) -> Result<RiseResult> {
    let target = x_hi + x_lo;
    if !(p0 >= 0.0 && p0 < target) {
        return Err(Error::InvalidParameter(format!(
            "rise start p0 = {p0} outside [0, {target})"
        )));
    }
    if !(t0 >= coeffs.s_prev()) {
        return Err(Error::InvalidParameter(format!(
            "rise start t0 = {t0} precedes s_prev = {}",
            coeffs.s_prev()
        )));
    }
    let g_at = |t: f64| if t > 0.0 { coeffs.eval(t) } else { 0.0 };
    let margin = g_at(t0) + 1.0;
    if margin < -opts.start_tol {
        return Err(Error::Invariant(format!(
            "G_{}({t0}) + 1 = {margin:e} is negative at rise start",
            coeffs.n()
        )));
    }
    let rhs = |t: f64, p: f64| eval_f(p, x_hi) * (g_at(t) + 1.0);
    let hit = |_t: f64, p: f64| p - target;
    let events = [Event::new(&hit, Crossing::Rising)];
    // The rise takes at most the band crossing time, which is bounded by F̄.
    let scale = crate::asymptotics::f_bar(x_hi)?;
    let t_end = t0 + 1e3 * scale.max(coeffs.s_prev());
    let seg = opts
        .solver()
        .integrate(&rhs, t0, p0, t_end, 1e-3 * scale, &events)?;
    match seg.stop {
        Stop::Event(_) => Ok(RiseResult {
            t_hit: seg.t,
            samples: seg.samples,
        }),
        Stop::Horizon => Err(Error::Solver(format!(
            "rise from t = {t0} did not reach the band"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallExit {
    /// `q` climbed back to `x_hi + x_lo`: the next rise is over.
    Band,
    Horizon,
}

#[derive(Debug, Clone)]
pub struct FallResult {
    /// Last time the front stopped.
    pub t_n: f64,
    /// `q` at that time, equal to the running minimum.
    pub q_n: f64,
    /// Accepted `(t, q, Q)` points; every step between consecutive points is monotone in `q`.
    pub samples: Vec<(f64, f64, f64)>,
    pub exit: FallExit,
}

/// Integrates `q̇ = F(q)(-G_n(t) - 2E(Q/(2√(Dt))) + 1)` from `q = x_hi - x_lo`.
///
/// While `q` sits at its running minimum the front moves with it; once `q̇`
/// turns positive `Q` is frozen until `q` comes back down to it.
pub fn integrate_fall(
    coeffs: &GCoefficients,
    t_start: f64,
    x_lo: f64,
    x_hi: f64,
    d: f64,
    horizon: f64,
    opts: &ReducedOptions,
) -> Result<FallResult> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "D must be positive, got {d}"
        )));
    }
    if !(t_start > 0.0 && horizon > t_start) {
        return Err(Error::InvalidParameter(format!(
            "fall window [{t_start}, {horizon}] is empty"
        )));
    }
    let n = coeffs.n();
    let rate = |t: f64, q: f64, big_q: f64| -> f64 {
        eval_f(q, x_hi) * (-coeffs.eval(t) - 2.0 * erf(big_q / (2.0 * (d * t).sqrt())) + 1.0)
    };
    let solver = opts.solver();
    let top = x_hi + x_lo;
    let mut t = t_start;
    let mut q = x_hi - x_lo;
    let mut big_q = q;
    let mut tracking = true;
    let mut last_stop: Option<(f64, f64)> = None;
    let mut samples = vec![(t, q, big_q)];
    let mut h = 1e-3;
    let mut guard = 0usize;
    let exit = loop {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Solver(format!(
                "fall {n}: mode switching does not settle"
            )));
        }
        if tracking {
            if rate(t, q, q) >= 0.0 {
                tracking = false;
                big_q = q;
                last_stop = Some((t, q));
                continue;
            }
            let rhs = |t: f64, q: f64| rate(t, q, q);
            let turn = |t: f64, q: f64| rate(t, q, q);
            let events = [Event::new(&turn, Crossing::Rising)];
            let seg = solver.integrate(&rhs, t, q, horizon, h, &events)?;
            h = seg.h_next;
            samples.extend(seg.samples.iter().skip(1).map(|&(t, q)| (t, q, q)));
            t = seg.t;
            q = seg.y;
            big_q = q;
            match seg.stop {
                Stop::Event(_) => {
                    tracking = false;
                    last_stop = Some((t, q));
                }
                Stop::Horizon => break FallExit::Horizon,
            }
        } else {
            let frozen = big_q;
            let rhs = |t: f64, q: f64| rate(t, q, frozen);
            let back = |_t: f64, q: f64| q - frozen;
            let out = |_t: f64, q: f64| q - top;
            let turn = |t: f64, q: f64| rate(t, q, frozen);
            let events = [
                Event::new(&back, Crossing::Falling),
                Event::new(&out, Crossing::Rising),
                Event::new(&turn, Crossing::Either),
            ];
            let seg = solver.integrate(&rhs, t, q, horizon, h, &events)?;
            h = seg.h_next;
            samples.extend(seg.samples.iter().skip(1).map(|&(t, q)| (t, q, frozen)));
            t = seg.t;
            q = seg.y;
            match seg.stop {
                Stop::Event(0) => {
                    q = q.min(frozen);
                    tracking = true;
                }
                Stop::Event(1) => break FallExit::Band,
                Stop::Event(_) => {}
                Stop::Horizon => break FallExit::Horizon,
            }
        }
    };
    let (t_n, q_n) = last_stop
        .ok_or_else(|| Error::Regime(format!("fall {n}: q never stopped before t = {horizon}")))?;
    if q_n >= x_hi - x_lo {
        return Err(Error::Regime(format!(
            "fall {n}: front stopped at the band edge, no front formed"
        )));
    }
    Ok(FallResult {
        t_n,
        q_n,
        samples,
        exit,
    })
}

/// One stitched phase: where it started rising and where its front stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedFront {
    pub n: usize,
    pub t_rise_start: f64,
    /// `t_{n-1/2}`, the time `w` reached the band.
    pub t_half: f64,
    pub t_n: f64,
    pub q_n: f64,
    pub x_n: f64,
    /// `q_n / (2√(D t_n))`.
    pub y_hat: f64,
}

#[derive(Debug, Clone)]
pub struct ReducedRun {
    pub fronts: Vec<ReducedFront>,
    pub trace: Trace,
    /// Phase index and cause when the chain stopped early.
    pub failure: Option<(usize, Error)>,
}

/// Chains `N` rise/fall phases into a `w(t)` trace.
///
/// `first_sign` is the sign of the initial uniform configuration; with `+1`
/// the input starts at `x_hi` and first decreases. Between phases `w` is
/// held constant if the front stopped before `s_{n-1}`.
pub fn reduced_trace(
    schedule: &AsymptoticSchedule,
    d: f64,
    n_fronts: usize,
    first_sign: Sign,
    opts: &ReducedOptions,
) -> Result<ReducedRun> {
    let run = reduced_trace_partial(schedule, d, n_fronts, first_sign, opts)?;
    match run.failure {
        Some((_, e)) => Err(e),
        None => Ok(run),
    }
}

/// Like [`reduced_trace`], but a failing phase ends the chain and is reported
/// in [`ReducedRun::failure`] together with everything produced before it.
pub fn reduced_trace_partial(
    schedule: &AsymptoticSchedule,
    d: f64,
    n_fronts: usize,
    first_sign: Sign,
    opts: &ReducedOptions,
) -> Result<ReducedRun> {
    let (x_lo, x_hi) = (schedule.x_lo, schedule.x_hi);
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "D must be positive, got {d}"
        )));
    }
    let available = schedule.fronts().count();
    if n_fronts == 0 || n_fronts > available {
        return Err(Error::InvalidParameter(format!(
            "requested {n_fronts} fronts, schedule provides {available}"
        )));
    }
    let mut trace = Trace::new(x_lo, x_hi);
    let mut config = SimpleConfiguration::uniform(x_lo, x_hi, first_sign)?;
    let mut tracker = FrontTracker::new();
    let mut fronts = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    let mut push =
        |t: f64, w: f64, trace: &mut Trace, config: &mut SimpleConfiguration| -> Result<()> {
            let next = match last {
                Some((_, w_prev)) => config_evolve(config, w_prev, w)?,
                None => {
                    let mut c = config.clone();
                    c.apply_input(w);
                    c
                }
            };
            if let Some((t_prev, w_prev)) = last {
                if t <= t_prev {
                    return Ok(());
                }
                tracker.observe(w_prev, t, w, config, &next, &mut trace.events);
            }
            *config = next;
            trace.rows.push(TraceRow {
                t,
                v: f64::NAN,
                w,
                u_total: 1.0,
                p: f64::NAN,
                config: config.clone(),
            });
            last = Some((t, w));
            Ok(())
        };
    let mut t0: f64 = 0.0;
    let mut p0: f64 = 0.0;
    let mut failure = None;
    for n in 1..=n_fronts {
        let mut phase = || -> Result<()> {
            // With `+1` relays the first phase pushes `w` down, so `w = x_hi - p`.
            let sigma = if n % 2 == 1 {
                -first_sign.value()
            } else {
                first_sign.value()
            };
            let coeffs = schedule.coefficients(n)?;
            let s_n = schedule
                .fronts()
                .nth(n - 1)
                .map(|r| r.s_n)
                .unwrap_or(f64::NAN);
            let start = t0.max(coeffs.s_prev());
            if start > t0 {
                let w_hold = sigma * (p0 - x_hi);
                push(start, w_hold, &mut trace, &mut config)?;
            }
            let rise = integrate_rise(&coeffs, p0, start, x_lo, x_hi, opts)?;
            for &(t, p) in &rise.samples {
                push(t, sigma * (p - x_hi), &mut trace, &mut config)?;
            }
            let horizon = opts.horizon_factor * s_n;
            let fall = integrate_fall(&coeffs, rise.t_hit, x_lo, x_hi, d, horizon, opts)?;
            for &(t, q, _) in fall.samples.iter().take_while(|s| s.0 <= fall.t_n) {
                push(t, sigma * (x_hi - q), &mut trace, &mut config)?;
            }
            fronts.push(ReducedFront {
                n,
                t_rise_start: start,
                t_half: rise.t_hit,
                t_n: fall.t_n,
                q_n: fall.q_n,
                x_n: x_hi - fall.q_n,
                y_hat: fall.q_n / (2.0 * (d * fall.t_n).sqrt()),
            });
            t0 = fall.t_n;
            p0 = fall.q_n;
            if n == n_fronts {
                // Close the last front with the start of the reversal.
                for &(t, q, _) in fall.samples.iter().skip_while(|s| s.0 <= fall.t_n) {
                    push(t, sigma * (x_hi - q), &mut trace, &mut config)?;
                }
            }
            Ok(())
        };
        if let Err(e) = phase() {
            failure = Some((n, stitch(n, e)));
            break;
        }
    }
    Ok(ReducedRun {
        fronts,
        trace,
        failure,
    })
}

fn stitch(n: usize, e: Error) -> Error {
    match e {
        Error::Regime(m) => Error::Regime(format!("phase {n}: {m}")),
        Error::Solver(m) => Error::Solver(format!("phase {n}: {m}")),
        Error::Invariant(m) => Error::Invariant(format!("phase {n}: {m}")),
        other => other,
    }
}
