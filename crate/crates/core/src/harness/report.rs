//! Cross-tier convergence study over a sweep of diffusion coefficients.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::asymptotics::io::{field_f64, field_usize};
use crate::asymptotics::{predict_front, run_algorithm, AsymptoticSchedule};
use crate::error::{Error, Result};
use crate::harness::config::{RunConfig, Tier};
use crate::hysteresis::Sign;
use crate::numerics::fmt17;
use crate::pde::{check_invariants, integrate};
use crate::reduced::{reduced_trace_partial, ReducedOptions};
use crate::trace::detect_steady_fronts;

pub const CONVERGENCE_HEADER: [&str; 14] = [
    "tier", "n", "D", "t_hat", "x_hat", "s_n", "x_n", "y_hat", "y_n", "err_t", "err_y", "decay_t",
    "decay_y", "status",
];

/// Error changes below this are treated as no change.
pub const NOISE_FLOOR: f64 = 1e-12;

/// How an error compares with the same `(tier, n)` at the previous, larger `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decay {
    First,
    Down,
    Flat,
    Up,
    /// One of the two errors is missing.
    Unknown,
}

impl Decay {
    pub fn name(&self) -> &'static str {
        match self {
            Decay::First => "first",
            Decay::Down => "down",
            Decay::Flat => "flat",
            Decay::Up => "up",
            Decay::Unknown => "na",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "first" => Decay::First,
            "down" => Decay::Down,
            "flat" => Decay::Flat,
            "up" => Decay::Up,
            "na" => Decay::Unknown,
            other => return Err(Error::Parse(format!("unknown decay `{other}`"))),
        })
    }

    fn between(prev: f64, cur: f64) -> Self {
        if !(prev.is_finite() && cur.is_finite()) {
            Decay::Unknown
        } else if (cur - prev).abs() <= NOISE_FLOOR {
            Decay::Flat
        } else if cur < prev {
            Decay::Down
        } else {
            Decay::Up
        }
    }
}

/// One `(tier, n, D)` cell of the study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub tier: Tier,
    pub n: usize,
    pub d: f64,
    pub t_hat: f64,
    pub x_hat: f64,
    pub s_n: f64,
    pub x_n: f64,
    /// `(x_hi - x_hat) / (2√(D t_hat))`.
    pub y_hat: f64,
    pub y_n: f64,
    /// `|t_hat - s_n|`.
    pub err_t: f64,
    /// `|y_hat / y_n - 1|`.
    pub err_y: f64,
    pub decay_t: Decay,
    pub decay_y: Decay,
    /// `ok`, or why the measurement is missing or suspect.
    pub status: String,
}

impl ConvergenceRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }

    /// Equality that treats NaN fields as equal.
    pub fn same_as(&self, other: &Self) -> bool {
        let eq = |a: f64, b: f64| a.to_bits() == b.to_bits() || a == b;
        self.tier == other.tier
            && self.n == other.n
            && eq(self.d, other.d)
            && eq(self.t_hat, other.t_hat)
            && eq(self.x_hat, other.x_hat)
            && eq(self.s_n, other.s_n)
            && eq(self.x_n, other.x_n)
            && eq(self.y_hat, other.y_hat)
            && eq(self.y_n, other.y_n)
            && eq(self.err_t, other.err_t)
            && eq(self.err_y, other.err_y)
            && self.decay_t == other.decay_t
            && self.decay_y == other.decay_y
            && self.status == other.status
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    /// Ordered by tier, then `n`, then decreasing `D`.
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn series(&self, tier: Tier, n: usize) -> Vec<&ConvergenceRow> {
        self.rows
            .iter()
            .filter(|r| r.tier == tier && r.n == n)
            .collect()
    }

    pub fn row(&self, tier: Tier, n: usize, d: f64) -> Option<&ConvergenceRow> {
        self.rows
            .iter()
            .find(|r| r.tier == tier && r.n == n && r.d == d)
    }

    /// True when every cell of the series is measured and `err_t` strictly drops.
    pub fn t_strictly_decreasing(&self, tier: Tier, n: usize) -> bool {
        let s = self.series(tier, n);
        !s.is_empty()
            && s.iter()
                .all(|r| r.ok() && matches!(r.decay_t, Decay::First | Decay::Down))
    }

    /// True when every cell is measured and `err_y` never grows.
    pub fn y_not_increasing(&self, tier: Tier, n: usize) -> bool {
        let s = self.series(tier, n);
        !s.is_empty()
            && s.iter()
                .all(|r| r.ok() && matches!(r.decay_y, Decay::First | Decay::Down | Decay::Flat))
    }

    /// Series whose errors grow somewhere along the sweep.
    pub fn non_monotone(&self) -> Vec<(Tier, usize)> {
        let mut out: Vec<(Tier, usize)> = Vec::new();
        for r in &self.rows {
            if (r.decay_t == Decay::Up || r.decay_y == Decay::Up) && !out.contains(&(r.tier, r.n)) {
                out.push((r.tier, r.n));
            }
        }
        out
    }
}

/// End time for full simulations that should see `n_fronts` fronts settle:
/// the moment `w` would reach the band again for the next front.
pub fn pde_horizon(schedule: &AsymptoticSchedule, n_fronts: usize) -> Result<f64> {
    if let Some(r) = schedule
        .record(n_fronts + 1)
        .filter(|r| r.s_half_n.is_finite())
    {
        return Ok(r.s_half_n);
    }
    let last = schedule
        .record(n_fronts)
        .filter(|r| r.s_n.is_finite())
        .ok_or_else(|| Error::InvalidParameter(format!("schedule has no front {n_fronts}")))?;
    Ok(2.0 * last.s_n)
}

/// Measured `(t_n, x_n)` of one cell plus the reason the list may be short.
type CellResult = (Vec<(f64, f64)>, Option<String>);

fn run_cell(
    cfg: &RunConfig,
    schedule: &AsymptoticSchedule,
    tier: Tier,
    d: f64,
    n: usize,
) -> CellResult {
    let attempt = || -> Result<CellResult> {
        match tier {
            Tier::Reduced => {
                let run =
                    reduced_trace_partial(schedule, d, n, Sign::Plus, &ReducedOptions::default())?;
                let fronts = detect_steady_fronts(&run.trace)?;
                Ok((fronts, run.failure.map(|(_, e)| e.to_string())))
            }
            Tier::Pde => {
                let params = cfg.model_params(d, Some(pde_horizon(schedule, n)?))?;
                let trace = integrate(&params)?;
                let fronts = detect_steady_fronts(&trace)?;
                let inv = check_invariants(&trace, &params);
                let note =
                    (!inv.ok()).then(|| Error::Invariant(inv.violations.join("; ")).to_string());
                Ok((fronts, note))
            }
        }
    };
    attempt().unwrap_or_else(|e| (Vec::new(), Some(e.to_string())))
}

/// Runs every `(tier, D)` cell in parallel and tabulates fronts `1..=N`
/// against the asymptotic predictions. Cell failures become row statuses.
pub fn convergence_report(cfg: &RunConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let mut ds = cfg.d_list()?;
    ds.sort_by(|a, b| b.total_cmp(a));
    ds.dedup();
    let tiers = cfg.tiers()?;
    let n_fronts = cfg.n_fronts()?;
    let x_hi = cfg.x_hi()?;
    let schedule = run_algorithm(
        cfg.x_lo()?,
        x_hi,
        cfg.horizon()?,
        cfg.n_max()?.max(n_fronts + 1),
        &cfg.algorithm_options()?,
    )?;
    let available = schedule.fronts().count();
    let cells: Vec<(Tier, f64)> = tiers
        .iter()
        .flat_map(|&t| ds.iter().map(move |&d| (t, d)))
        .collect();
    let results: Vec<CellResult> = cells
        .par_iter()
        .map(|&(tier, d)| run_cell(cfg, &schedule, tier, d, n_fronts.min(available)))
        .collect();

    let mut rows = Vec::new();
    for &tier in &tiers {
        for n in 1..=n_fronts {
            let mut prev: Option<(f64, f64)> = None;
            for (ci, &(ct, d)) in cells.iter().enumerate() {
                if ct != tier {
                    continue;
                }
                let (fronts, note) = &results[ci];
                let mut row = ConvergenceRow {
                    tier,
                    n,
                    d,
                    t_hat: f64::NAN,
                    x_hat: f64::NAN,
                    s_n: f64::NAN,
                    x_n: f64::NAN,
                    y_hat: f64::NAN,
                    y_n: f64::NAN,
                    err_t: f64::NAN,
                    err_y: f64::NAN,
                    decay_t: Decay::Unknown,
                    decay_y: Decay::Unknown,
                    status: "ok".into(),
                };
                match schedule.fronts().nth(n - 1) {
                    Some(rec) => {
                        let p = predict_front(rec, x_hi, d);
                        row.s_n = p.t_n;
                        row.x_n = p.x_n;
                        row.y_n = rec.y_n;
                    }
                    None => row.status = format!("schedule has no front {n}"),
                }
                match fronts.get(n - 1) {
                    Some(&(t, x)) => {
                        row.t_hat = t;
                        row.x_hat = x;
                        row.y_hat = (x_hi - x) / (2.0 * (d * t).sqrt());
                        row.err_t = (t - row.s_n).abs();
                        row.err_y = (row.y_hat / row.y_n - 1.0).abs();
                        if let Some(msg) = note.as_ref().filter(|m| m.starts_with("invariant")) {
                            row.status = msg.clone();
                        }
                    }
                    None if row.ok() => {
                        row.status = note
                            .clone()
                            .unwrap_or_else(|| format!("front {n} not detected"));
                    }
                    None => {}
                }
                (row.decay_t, row.decay_y) = match prev {
                    None => (Decay::First, Decay::First),
                    Some((pt, py)) => {
                        (Decay::between(pt, row.err_t), Decay::between(py, row.err_y))
                    }
                };
                prev = Some((row.err_t, row.err_y));
                rows.push(row);
            }
        }
    }
    Ok(ConvergenceReport { rows })
}

pub fn write_convergence_csv<W: Write>(report: &ConvergenceReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CONVERGENCE_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.tier.name().to_string(),
            r.n.to_string(),
            fmt17(r.d),
            fmt17(r.t_hat),
            fmt17(r.x_hat),
            fmt17(r.s_n),
            fmt17(r.x_n),
            fmt17(r.y_hat),
            fmt17(r.y_n),
            fmt17(r.err_t),
            fmt17(r.err_y),
            r.decay_t.name().to_string(),
            r.decay_y.name().to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_convergence_csv<R: Read>(input: R) -> Result<ConvergenceReport> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?;
    if header
        .iter()
        .map(str::trim)
        .ne(CONVERGENCE_HEADER.iter().copied())
    {
        return Err(Error::Parse(format!(
            "expected header {}",
            CONVERGENCE_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != CONVERGENCE_HEADER.len() {
            return Err(Error::Parse(format!(
                "expected {} columns, got {}",
                CONVERGENCE_HEADER.len(),
                rec.len()
            )));
        }
        rows.push(ConvergenceRow {
            tier: Tier::parse(&rec[0])?,
            n: field_usize(&rec, 1)?,
            d: field_f64(&rec, 2)?,
            t_hat: field_f64(&rec, 3)?,
            x_hat: field_f64(&rec, 4)?,
            s_n: field_f64(&rec, 5)?,
            x_n: field_f64(&rec, 6)?,
            y_hat: field_f64(&rec, 7)?,
            y_n: field_f64(&rec, 8)?,
            err_t: field_f64(&rec, 9)?,
            err_y: field_f64(&rec, 10)?,
            decay_t: Decay::parse(&rec[11])?,
            decay_y: Decay::parse(&rec[12])?,
            status: rec[13].to_string(),
        });
    }
    Ok(ConvergenceReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reduced_cfg(ds: &str) -> RunConfig {
        RunConfig::parse(&format!("D = {ds}\ntiers = reduced\nN = 2\nn_max = 3\n")).unwrap()
    }

    #[test]
    fn reduced_rows_cover_grid() {
        let rep = convergence_report(&reduced_cfg("1e-4, 1e-3")).unwrap();
        assert_eq!(rep.rows.len(), 4);
        // sorted by decreasing D inside each series
        assert_eq!(rep.rows[0].d, 1e-3);
        assert_eq!(rep.rows[1].d, 1e-4);
        assert!(rep.rows.iter().all(|r| r.ok()), "{:?}", rep.rows);
        assert!(rep.t_strictly_decreasing(Tier::Reduced, 1));
        let r = rep.row(Tier::Reduced, 1, 1e-4).unwrap();
        assert!(r.err_y < 1e-6);
    }

    #[test]
    fn csv_round_trip() {
        let mut rep = convergence_report(&reduced_cfg("1e-3")).unwrap();
        rep.rows[1].status = "front 2 not detected, \"quoted\"".into();
        rep.rows[1].t_hat = f64::NAN;
        let mut buf = Vec::new();
        write_convergence_csv(&rep, &mut buf).unwrap();
        let back = read_convergence_csv(buf.as_slice()).unwrap();
        assert_eq!(back.rows.len(), rep.rows.len());
        assert!(back.rows.iter().zip(&rep.rows).all(|(a, b)| a.same_as(b)));
    }

    #[test]
    fn empty_selections_are_usage_errors() {
        let cfg = RunConfig::parse("D = \n").unwrap();
        assert!(matches!(
            convergence_report(&cfg),
            Err(Error::InvalidParameter(_))
        ));
        let cfg = RunConfig::parse("tiers = ,\n").unwrap();
        assert!(matches!(
            convergence_report(&cfg),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn missing_front_is_reported_not_fatal() {
        // at D = 0.01 the third front would need q_3 beyond the band
        let cfg = RunConfig::parse("D = 1e-2\ntiers = reduced\nN = 3\n").unwrap();
        let rep = convergence_report(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(!rep.rows[2].ok());
        assert!(rep.rows[2].t_hat.is_nan());
    }
}
