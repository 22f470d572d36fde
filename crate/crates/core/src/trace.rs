//! Sampled runs shared by the simulator and the reduced model: rows, the
//! switching event log, `u` snapshots, and their CSV forms.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hysteresis::SimpleConfiguration;
use crate::numerics::fmt17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// Relays start switching on a new monotone stretch of `w`.
    SwitchStart,
    /// `w` turns around; `x` is the signed turning value.
    DirectionChange,
    /// A front that was moving stops; `x` is its threshold.
    FrontSteady,
    /// A previously steady front is swept away; `x` is its threshold.
    FrontDisappear,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::SwitchStart => "SWITCH_START",
            EventKind::DirectionChange => "DIRECTION_CHANGE",
            EventKind::FrontSteady => "FRONT_STEADY",
            EventKind::FrontDisappear => "FRONT_DISAPPEAR",
        })
    }
}

impl FromStr for EventKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "SWITCH_START" => Ok(EventKind::SwitchStart),
            "DIRECTION_CHANGE" => Ok(EventKind::DirectionChange),
            "FRONT_STEADY" => Ok(EventKind::FrontSteady),
            "FRONT_DISAPPEAR" => Ok(EventKind::FrontDisappear),
            other => Err(Error::Parse(format!("unknown event kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub v: f64,
    pub w: f64,
    pub u_total: f64,
    pub p: f64,
    pub config: SimpleConfiguration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub x_lo: f64,
    pub x_hi: f64,
    pub rows: Vec<TraceRow>,
    pub events: Vec<TraceEvent>,
    pub snapshots: Vec<Snapshot>,
    /// Smallest density value seen at any step, `+∞` when no density is modeled.
    pub min_density: f64,
}

impl Trace {
    pub fn new(x_lo: f64, x_hi: f64) -> Self {
        Self {
            x_lo,
            x_hi,
            rows: Vec::new(),
            events: Vec::new(),
            snapshots: Vec::new(),
            min_density: f64::INFINITY,
        }
    }

    pub fn final_row(&self) -> Option<&TraceRow> {
        self.rows.last()
    }
}

/// Turns a stream of monotone steps into switching events.
///
/// Callers must split steps where `w` changes direction so that each observed
/// step is monotone.
#[derive(Debug, Clone, Default)]
pub struct FrontTracker {
    direction: i8,
    moved: bool,
    switching: bool,
    steady: Vec<f64>,
    /// End of the last step in which `w` moved; a held `w` keeps this time.
    last_move: f64,
}

impl FrontTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(
        &mut self,
        w_prev: f64,
        t: f64,
        w: f64,
        before: &SimpleConfiguration,
        after: &SimpleConfiguration,
        events: &mut Vec<TraceEvent>,
    ) {
        let d: i8 = if w > w_prev {
            1
        } else if w < w_prev {
            -1
        } else {
            0
        };
        if d != 0 && self.direction != 0 && d != self.direction {
            let t_turn = self.last_move;
            events.push(TraceEvent {
                kind: EventKind::DirectionChange,
                t: t_turn,
                x: w_prev,
            });
            if self.moved {
                events.push(TraceEvent {
                    kind: EventKind::FrontSteady,
                    t: t_turn,
                    x: w_prev.abs(),
                });
                self.steady.push(w_prev.abs());
            }
            self.moved = false;
            self.switching = false;
        }
        if d != 0 {
            self.direction = d;
            self.last_move = t;
        }
        if before != after {
            if !self.switching {
                events.push(TraceEvent {
                    kind: EventKind::SwitchStart,
                    t,
                    x: w.abs(),
                });
                self.switching = true;
            }
            self.moved = true;
            let tol = 1e-12 * (after.x_hi() - after.x_lo());
            let fronts = after.fronts();
            let mut gone = Vec::new();
            self.steady.retain(|&f| {
                let alive = fronts.iter().any(|&g| (g - f).abs() <= tol);
                if !alive {
                    gone.push(f);
                }
                alive
            });
            for f in gone {
                events.push(TraceEvent {
                    kind: EventKind::FrontDisappear,
                    t,
                    x: f,
                });
            }
        }
    }
}

/// Fronts that stopped moving and were never swept away within the trace,
/// as `(t_n, x_n)` in order of formation.
pub fn detect_steady_fronts(trace: &Trace) -> Result<Vec<(f64, f64)>> {
    let last = trace
        .final_row()
        .ok_or_else(|| Error::InvalidParameter("trace has no rows".into()))?;
    let tol = 1e-12 * (trace.x_hi - trace.x_lo);
    let finals = last.config.fronts();
    let mut out = Vec::new();
    for (i, e) in trace.events.iter().enumerate() {
        if e.kind != EventKind::FrontSteady {
            continue;
        }
        let alive = finals.iter().any(|&f| (f - e.x).abs() <= tol);
        let swept = trace.events[i + 1..]
            .iter()
            .any(|l| l.kind == EventKind::FrontDisappear && (l.x - e.x).abs() <= tol);
        if alive && !swept {
            out.push((e.t, e.x));
        }
    }
    Ok(out)
}

pub const TRACE_HEADER: [&str; 6] = ["t", "v", "w", "U_total", "P", "config"];
pub const EVENTS_HEADER: [&str; 3] = ["kind", "t", "x"];
pub const SNAPSHOT_HEADER: [&str; 2] = ["x", "u"];

fn expect_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Parse(format!(
            "expected header {}, got {:?}",
            expected.join(","),
            header
        )));
    }
    Ok(())
}

fn num(rec: &csv::StringRecord, i: usize) -> Result<f64> {
    let s = rec
        .get(i)
        .ok_or_else(|| Error::Parse(format!("missing column {i}")))?;
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number `{s}` in column {i}")))
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in rows {
        w.write_record([
            fmt17(r.t),
            fmt17(r.v),
            fmt17(r.w),
            fmt17(r.u_total),
            fmt17(r.p),
            r.config.to_line(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(x_lo: f64, x_hi: f64, input: R) -> Result<Vec<TraceRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    expect_header(&mut rdr, &TRACE_HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec
            .get(5)
            .ok_or_else(|| Error::Parse("missing config column".into()))?;
        rows.push(TraceRow {
            t: num(&rec, 0)?,
            v: num(&rec, 1)?,
            w: num(&rec, 2)?,
            u_total: num(&rec, 3)?,
            p: num(&rec, 4)?,
            config: SimpleConfiguration::from_line(x_lo, x_hi, line)?,
        });
    }
    Ok(rows)
}

pub fn write_events_csv<W: Write>(events: &[TraceEvent], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EVENTS_HEADER)?;
    for e in events {
        w.write_record([e.kind.to_string(), fmt17(e.t), fmt17(e.x)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_events_csv<R: Read>(input: R) -> Result<Vec<TraceEvent>> {
    let mut rdr = csv::Reader::from_reader(input);
    expect_header(&mut rdr, &EVENTS_HEADER)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let kind = rec
            .get(0)
            .ok_or_else(|| Error::Parse("missing kind".into()))?
            .parse()?;
        out.push(TraceEvent {
            kind,
            t: num(&rec, 1)?,
            x: num(&rec, 2)?,
        });
    }
    Ok(out)
}

pub fn write_snapshot_csv<W: Write>(snap: &Snapshot, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SNAPSHOT_HEADER)?;
    for (x, u) in snap.x.iter().zip(&snap.u) {
        w.write_record([fmt17(*x), fmt17(*u)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot_csv<R: Read>(t: f64, input: R) -> Result<Snapshot> {
    let mut rdr = csv::Reader::from_reader(input);
    expect_header(&mut rdr, &SNAPSHOT_HEADER)?;
    let (mut x, mut u) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        x.push(num(&rec, 0)?);
        u.push(num(&rec, 1)?);
    }
    Ok(Snapshot { t, x, u })
}

/// File name for a snapshot taken at `t`.
pub fn snapshot_file_name(t: f64) -> String {
    format!("u_{}.csv", fmt17(t))
}
