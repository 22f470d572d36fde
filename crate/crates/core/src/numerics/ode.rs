//! Scalar Dormand-Prince 5(4) integrator with event location.
//!
//! Events are located by bisecting on the step length of a single
//! re-taken step from the last accepted point, so the located state carries
//! the full fifth-order accuracy of the pair.

use crate::error::{Error, Result};
use crate::numerics::roots::bisect_predicate;

/// Crossing direction an event reacts to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Rising,
    Falling,
    Either,
}

/// Zero-crossing condition `g(t, y) = 0`.
pub struct Event<'a> {
    pub g: &'a dyn Fn(f64, f64) -> f64,
    pub crossing: Crossing,
}

impl<'a> Event<'a> {
    pub fn new(g: &'a dyn Fn(f64, f64) -> f64, crossing: Crossing) -> Self {
        Self { g, crossing }
    }

    fn crossed(&self, g0: f64, g1: f64) -> bool {
        let rising = g0 < 0.0 && g1 >= 0.0;
        let falling = g0 > 0.0 && g1 <= 0.0;
        match self.crossing {
            Crossing::Rising => rising,
            Crossing::Falling => falling,
            Crossing::Either => rising || falling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    /// Index into the event list.
    Event(usize),
    Horizon,
}

#[derive(Debug, Clone)]
pub struct Segment {
    pub t: f64,
    pub y: f64,
    pub stop: Stop,
    /// Accepted points, including the initial and final ones.
    pub samples: Vec<(f64, f64)>,
    /// Step size to resume with.
    pub h_next: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub event_tol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_max: f64::INFINITY,
            event_tol: 1e-12,
            max_steps: 5_000_000,
        }
    }
}

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl Dopri5 {
    pub fn with_tolerance(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// One step of size `h`; returns the fifth-order value and the embedded error.
    pub fn step<F: Fn(f64, f64) -> f64>(&self, f: &F, t: f64, y: f64, h: f64) -> (f64, f64) {
        let k1 = f(t, y);
        let k2 = f(t + C[0] * h, y + h * (k1 / 5.0));
        let k3 = f(t + C[1] * h, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
        let k4 = f(
            t + C[2] * h,
            y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3),
        );
        let k5 = f(
            t + C[3] * h,
            y + h
                * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3
                    - 212.0 / 729.0 * k4),
        );
        let k6 = f(
            t + C[4] * h,
            y + h
                * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2
                    + 46732.0 / 5247.0 * k3
                    + 49.0 / 176.0 * k4
                    - 5103.0 / 18656.0 * k5),
        );
        let y5 = y + h * (B5[0] * k1 + B5[2] * k3 + B5[3] * k4 + B5[4] * k5 + B5[5] * k6);
        let k7 = f(t + h, y5);
        let k = [k1, k2, k3, k4, k5, k6, k7];
        let err = h * k.iter().zip(ERR.iter()).map(|(k, e)| k * e).sum::<f64>();
        (y5, err)
    }

    /// Integrates from `(t0, y0)` until `t_end` or the first event.
    pub fn integrate<F: Fn(f64, f64) -> f64>(
        &self,
        f: &F,
        t0: f64,
        y0: f64,
        t_end: f64,
        h0: f64,
        events: &[Event<'_>],
    ) -> Result<Segment> {
        if !(t0.is_finite() && y0.is_finite() && t_end.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite start ({t0}, {y0}) or end {t_end}"
            )));
        }
        let mut t = t0;
        let mut y = y0;
        let mut h = h0.min(self.h_max).min(t_end - t0).max(1e-12);
        let mut samples = vec![(t, y)];
        let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, y)).collect();
        if t >= t_end {
            return Ok(Segment {
                t,
                y,
                stop: Stop::Horizon,
                samples,
                h_next: h,
            });
        }
        for _ in 0..self.max_steps {
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }
            let (y1, err) = self.step(f, t, y, h);
            let scale = self.atol + self.rtol * y.abs().max(y1.abs());
            let ratio = (err / scale).abs();
            if !y1.is_finite() {
                h *= 0.25;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Solver(format!("non-finite state near t = {t}")));
                }
                continue;
            }
            if ratio > 1.0 {
                h *= (0.9 * ratio.powf(-0.2)).max(0.2);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Solver(format!("step size underflow at t = {t}")));
                }
                continue;
            }
            let t1 = if last { t_end } else { t + h };
            // Earliest triggered event inside (t, t1].
            let mut hit: Option<(usize, f64)> = None;
            for (i, ev) in events.iter().enumerate() {
                let g1 = (ev.g)(t1, y1);
                if ev.crossed(g_prev[i], g1) {
                    let g0 = g_prev[i];
                    let theta = bisect_predicate(
                        |s| {
                            let (ys, _) = self.step(f, t, y, s);
                            ev.crossed(g0, (ev.g)(t + s, ys))
                        },
                        0.0,
                        t1 - t,
                        self.event_tol,
                    );
                    if hit.is_none_or(|(_, best)| theta < best) {
                        hit = Some((i, theta));
                    }
                }
            }
            if let Some((i, theta)) = hit {
                let (ye, _) = self.step(f, t, y, theta);
                let te = t + theta;
                samples.push((te, ye));
                return Ok(Segment {
                    t: te,
                    y: ye,
                    stop: Stop::Event(i),
                    samples,
                    h_next: h,
                });
            }
            t = t1;
            y = y1;
            samples.push((t, y));
            for (i, ev) in events.iter().enumerate() {
                g_prev[i] = (ev.g)(t, y);
            }
            let grow = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * grow).min(self.h_max);
            if last {
                return Ok(Segment {
                    t,
                    y,
                    stop: Stop::Horizon,
                    samples,
                    h_next: h,
                });
            }
        }
        Err(Error::Solver(format!(
            "step limit {} exceeded",
            self.max_steps
        )))
    }
}
