//! CSV forms of schedules and predictions.

use std::io::{Read, Write};

use crate::asymptotics::schedule::{AsymptoticSchedule, Case, FrontPrediction};
use crate::error::{Error, Result};
use crate::numerics::fmt17;

pub const SCHEDULE_HEADER: [&str; 6] = ["n", "case", "s_tilde", "s_n", "y_n", "s_half_n"];
pub const PREDICTION_HEADER: [&str; 5] = ["n", "D", "t_n", "q_n", "x_n"];

/// One line of the schedule file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleRow {
    pub n: usize,
    pub case: Case,
    pub s_tilde: f64,
    pub s_n: f64,
    pub y_n: f64,
    pub s_half_n: f64,
}

impl ScheduleRow {
    /// Equality that treats NaN fields of terminated rows as equal.
    pub fn same_as(&self, other: &Self) -> bool {
        let eq = |a: f64, b: f64| a.to_bits() == b.to_bits() || a == b;
        self.n == other.n
            && self.case == other.case
            && eq(self.s_tilde, other.s_tilde)
            && eq(self.s_n, other.s_n)
            && eq(self.y_n, other.y_n)
            && eq(self.s_half_n, other.s_half_n)
    }
}

pub fn schedule_rows(schedule: &AsymptoticSchedule) -> Vec<ScheduleRow> {
    schedule
        .records
        .iter()
        .map(|r| ScheduleRow {
            n: r.n,
            case: r.case,
            s_tilde: r.s_tilde,
            s_n: r.s_n,
            y_n: r.y_n,
            s_half_n: r.s_half_n,
        })
        .collect()
}

pub fn write_schedule_csv<W: Write>(rows: &[ScheduleRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCHEDULE_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.case.to_string(),
            fmt17(r.s_tilde),
            fmt17(r.s_n),
            fmt17(r.y_n),
            fmt17(r.s_half_n),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn check_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
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

pub(crate) fn field_f64(rec: &csv::StringRecord, i: usize) -> Result<f64> {
    let s = rec
        .get(i)
        .ok_or_else(|| Error::Parse(format!("missing column {i}")))?;
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number `{s}` in column {i}")))
}

pub(crate) fn field_usize(rec: &csv::StringRecord, i: usize) -> Result<usize> {
    let s = rec
        .get(i)
        .ok_or_else(|| Error::Parse(format!("missing column {i}")))?;
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad index `{s}` in column {i}")))
}

pub fn read_schedule_csv<R: Read>(input: R) -> Result<Vec<ScheduleRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &SCHEDULE_HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let case = rec
            .get(1)
            .ok_or_else(|| Error::Parse("missing case".into()))?
            .parse()?;
        rows.push(ScheduleRow {
            n: field_usize(&rec, 0)?,
            case,
            s_tilde: field_f64(&rec, 2)?,
            s_n: field_f64(&rec, 3)?,
            y_n: field_f64(&rec, 4)?,
            s_half_n: field_f64(&rec, 5)?,
        });
    }
    Ok(rows)
}

pub fn write_predictions_csv<W: Write>(preds: &[FrontPrediction], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PREDICTION_HEADER)?;
    for p in preds {
        w.write_record([
            p.n.to_string(),
            fmt17(p.d),
            fmt17(p.t_n),
            fmt17(p.q_n),
            fmt17(p.x_n),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_predictions_csv<R: Read>(input: R) -> Result<Vec<FrontPrediction>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &PREDICTION_HEADER)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        out.push(FrontPrediction {
            n: field_usize(&rec, 0)?,
            d: field_f64(&rec, 1)?,
            t_n: field_f64(&rec, 2)?,
            q_n: field_f64(&rec, 3)?,
            x_n: field_f64(&rec, 4)?,
        });
    }
    Ok(out)
}
