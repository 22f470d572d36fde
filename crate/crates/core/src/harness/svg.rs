//! Minimal native SVG charts: line and marker series on linear or log axes.

use std::fmt::Write as _;

use crate::asymptotics::io::ScheduleRow;
use crate::asymptotics::Case;
use crate::error::{Error, Result};
use crate::harness::config::Tier;
use crate::harness::report::ConvergenceReport;
use crate::trace::{Snapshot, TraceRow};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Markers,
    Both,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    /// Hollow markers.
    pub open: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: Style) -> Self {
        Self {
            label: label.into(),
            points,
            style,
            open: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Result<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Err(Error::InvalidParameter("no plottable points".into()));
        }
        if hi - lo <= 1e-12 * lo.abs().max(1.0) {
            let pad = if log { 0.5 } else { 0.5 * lo.abs().max(1e-3) };
            lo -= pad;
            hi += pad;
        } else if log {
            lo = lo.floor();
            hi = hi.ceil();
        } else {
            let pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        Ok(Self { lo, hi, log })
    }

    /// Fraction along the axis, or `None` for values a log axis cannot show.
    fn frac(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some((v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let stride = ((b - a) / 6 + 1).max(1);
            return (a..=b)
                .step_by(stride as usize)
                .map(|e| (10f64.powi(e), format!("1e{e}")))
                .collect();
        }
        let raw = (self.hi - self.lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let mut out = Vec::new();
        let mut k = (self.lo / step).ceil();
        while k * step <= self.hi + 1e-9 * step {
            let v = k * step;
            let v = if v.abs() < 1e-12 * step { 0.0 } else { v };
            out.push((v, format!("{}", (v * 1e9).round() / 1e9)));
            k += 1.0;
        }
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn render_panel(out: &mut String, p: &Panel, x0: f64, width: f64) -> Result<()> {
    let (left, right, top, bottom) = (x0 + 62.0, x0 + width - 14.0, 46.0, HEIGHT - 52.0);
    let xa = Axis::fit(
        p.series.iter().flat_map(|s| s.points.iter().map(|q| q.0)),
        p.log_x,
    )?;
    let ya = Axis::fit(
        p.series.iter().flat_map(|s| s.points.iter().map(|q| q.1)),
        p.log_y,
    )?;
    let px = |v: f64| xa.frac(v).map(|f| left + f * (right - left));
    let py = |v: f64| ya.frac(v).map(|f| bottom - f * (bottom - top));

    writeln!(
        out,
        "<g class=\"panel\" data-title=\"{}\">",
        escape(&p.title)
    )
    .unwrap();
    writeln!(
        out,
        "<rect x=\"{left:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333\"/>",
        right - left,
        bottom - top
    )
    .unwrap();
    for (v, label) in xa.ticks() {
        if let Some(x) = px(v) {
            writeln!(out, "<line x1=\"{x:.2}\" y1=\"{bottom:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>", bottom + 5.0).unwrap();
            writeln!(out, "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{label}</text>", bottom + 18.0).unwrap();
        }
    }
    for (v, label) in ya.ticks() {
        if let Some(y) = py(v) {
            writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{left:.2}\" y2=\"{y:.2}\" stroke=\"#333\"/>",
                left - 5.0
            )
            .unwrap();
            writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{label}</text>",
                left - 8.0,
                y + 4.0
            )
            .unwrap();
        }
    }
    let cx = 0.5 * (left + right);
    writeln!(
        out,
        "<text x=\"{cx:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        top - 14.0,
        escape(&p.title)
    )
    .unwrap();
    writeln!(
        out,
        "<text x=\"{cx:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        HEIGHT - 14.0,
        escape(&p.x_label)
    )
    .unwrap();
    let cy = 0.5 * (top + bottom);
    writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{cy:.2}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 {:.2} {cy:.2})\">{}</text>",
        x0 + 16.0,
        x0 + 16.0,
        escape(&p.y_label)
    )
    .unwrap();

    for (k, s) in p.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter_map(|&(x, y)| Some((px(x)?, py(y)?)))
            .collect();
        writeln!(
            out,
            "<g class=\"series\" data-label=\"{}\">",
            escape(&s.label)
        )
        .unwrap();
        if matches!(s.style, Style::Line | Style::Both) && pts.len() > 1 {
            let mut d = String::new();
            for (i, (x, y)) in pts.iter().enumerate() {
                write!(d, "{}{x:.2},{y:.2}", if i == 0 { "M" } else { " L" }).unwrap();
            }
            writeln!(
                out,
                "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>"
            )
            .unwrap();
        }
        if matches!(s.style, Style::Markers | Style::Both) {
            let fill = if s.open { "white" } else { color };
            for (x, y) in &pts {
                writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.5\" fill=\"{fill}\" stroke=\"{color}\"/>").unwrap();
            }
        }
        let ly = top + 16.0 + 15.0 * k as f64;
        writeln!(out, "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>", left + 8.0, ly - 4.0, left + 24.0, ly - 4.0).unwrap();
        writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{ly:.2}\" font-size=\"11\">{}</text>",
            left + 28.0,
            escape(&s.label)
        )
        .unwrap();
        out.push_str("</g>\n");
    }
    out.push_str("</g>\n");
    Ok(())
}

/// Lays the panels out side by side in one 800×500 drawing.
pub fn render(panels: &[Panel]) -> Result<String> {
    if panels.is_empty() {
        return Err(Error::InvalidParameter("nothing to plot".into()));
    }
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" width=\"{WIDTH}\" height=\"{HEIGHT}\" font-family=\"sans-serif\">"
    )
    .unwrap();
    writeln!(
        out,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    )
    .unwrap();
    let w = WIDTH / panels.len() as f64;
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut out, p, i as f64 * w, w)?;
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Two panels: `s_n` and `q_n` against `n`. Without `D` the second panel
/// shows the D-free scale `q_n/√D = 2 y_n √s_n`.
pub fn schedule_plot(rows: &[ScheduleRow], d: Option<f64>) -> Result<String> {
    let fronts: Vec<&ScheduleRow> = rows.iter().filter(|r| r.case != Case::Terminated).collect();
    let by_case = |case: Case, f: &dyn Fn(&ScheduleRow) -> f64| -> Vec<(f64, f64)> {
        fronts
            .iter()
            .filter(|r| r.case == case)
            .map(|r| (r.n as f64, f(r)))
            .collect()
    };
    let s = |r: &ScheduleRow| r.s_n;
    let scale = d.map_or(1.0, f64::sqrt);
    let q = move |r: &ScheduleRow| 2.0 * r.y_n * (r.s_n).sqrt() * scale;
    let panel = |title: &str, y_label: &str, f: &dyn Fn(&ScheduleRow) -> f64, name: &str| {
        let mut b = Series::new(
            format!("{name}, case B"),
            by_case(Case::B, f),
            Style::Markers,
        );
        b.open = true;
        Panel {
            title: title.into(),
            x_label: "n".into(),
            y_label: y_label.into(),
            series: vec![
                Series::new(
                    name,
                    fronts.iter().map(|r| (r.n as f64, f(r))).collect(),
                    Style::Line,
                ),
                Series::new(
                    format!("{name}, case A"),
                    by_case(Case::A, f),
                    Style::Markers,
                ),
                b,
            ],
            ..Panel::default()
        }
    };
    let q_label = match d {
        Some(d) => format!("q_n at D = {d:e}"),
        None => "q_n / √D".to_string(),
    };
    render(&[
        panel("a) s_n", "s_n", &s, "s_n"),
        panel("b) q_n", &q_label, &q, "q_n"),
    ])
}

/// `w(t)` for one or more traces.
pub fn trace_plot(traces: &[(String, Vec<TraceRow>)]) -> Result<String> {
    let series = traces
        .iter()
        .map(|(label, rows)| {
            Series::new(
                label.clone(),
                rows.iter().map(|r| (r.t, r.w)).collect(),
                Style::Line,
            )
        })
        .collect();
    render(&[Panel {
        title: "w(t)".into(),
        x_label: "t".into(),
        y_label: "w".into(),
        series,
        ..Panel::default()
    }])
}

/// Density profiles `u(x)` at several times.
pub fn snapshot_plot(snaps: &[Snapshot], log_y: bool) -> Result<String> {
    let series = snaps
        .iter()
        .map(|s| {
            Series::new(
                format!("t = {:.4}", s.t),
                s.x.iter().copied().zip(s.u.iter().copied()).collect(),
                Style::Line,
            )
        })
        .collect();
    render(&[Panel {
        title: "u(x, t)".into(),
        x_label: "x".into(),
        y_label: "u".into(),
        log_y,
        series,
        ..Panel::default()
    }])
}

/// Errors against `D` on log axes, one series per tier and front.
pub fn convergence_plot(report: &ConvergenceReport, log_x: bool) -> Result<String> {
    let mut keys: Vec<(Tier, usize)> = report.rows.iter().map(|r| (r.tier, r.n)).collect();
    keys.dedup();
    let panel = |title: &str, f: &dyn Fn(&crate::harness::report::ConvergenceRow) -> f64| Panel {
        title: title.into(),
        x_label: "D".into(),
        y_label: title.into(),
        log_x,
        log_y: true,
        series: keys
            .iter()
            .map(|&(tier, n)| {
                let pts = report.series(tier, n).iter().map(|r| (r.d, f(r))).collect();
                Series::new(format!("{} n={n}", tier.name()), pts, Style::Both)
            })
            .collect(),
    };
    render(&[
        panel("|t_hat - s_n|", &|r| r.err_t),
        panel("|y_hat/y_n - 1|", &|r| r.err_y),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circles(svg: &str, label: &str) -> Vec<(f64, f64)> {
        let start = svg.find(&format!("data-label=\"{label}\"")).unwrap();
        let end = start + svg[start..].find("</g>").unwrap();
        svg[start..end]
            .lines()
            .filter(|l| l.starts_with("<circle"))
            .map(|l| {
                let attr = |k: &str| {
                    let i = l.find(&format!("{k}=\"")).unwrap() + k.len() + 2;
                    l[i..i + l[i..].find('"').unwrap()].parse::<f64>().unwrap()
                };
                (attr("cx"), attr("cy"))
            })
            .collect()
    }

    #[test]
    fn two_panels_and_fixed_viewbox() {
        let rows: Vec<ScheduleRow> = (1..=4)
            .map(|n| ScheduleRow {
                n,
                case: if n < 4 { Case::A } else { Case::B },
                s_tilde: n as f64,
                s_n: (n * n) as f64,
                y_n: 0.5 + 0.1 * n as f64,
                s_half_n: n as f64 - 0.5,
            })
            .collect();
        let svg = schedule_plot(&rows, None).unwrap();
        assert!(svg.contains("viewBox=\"0 0 800 500\""));
        assert_eq!(svg.matches("class=\"panel\"").count(), 2);
        let a = circles(&svg, "s_n, case A");
        assert_eq!(a.len(), 3);
        // larger s_n sits higher, so cy drops
        assert!(a.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1));
        assert_eq!(circles(&svg, "s_n, case B").len(), 1);
    }

    #[test]
    fn log_axis_skips_nonpositive() {
        let p = Panel {
            title: "e<r>".into(),
            log_x: true,
            series: vec![Series::new(
                "e",
                vec![(1e-5, 1.0), (1e-3, 2.0), (0.0, 3.0)],
                Style::Markers,
            )],
            ..Panel::default()
        };
        let svg = render(&[p]).unwrap();
        assert!(svg.contains("e&lt;r&gt;"));
        assert_eq!(circles(&svg, "e").len(), 2);
        assert!(svg.contains(">1e-4<"));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(render(&[]).is_err());
        assert!(trace_plot(&[]).is_err());
    }
}
