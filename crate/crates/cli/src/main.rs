//! `relayfront` command-line driver.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relayfront::asymptotics::io::{
    read_schedule_csv, schedule_rows, write_predictions_csv, write_schedule_csv,
};
use relayfront::asymptotics::{predict_fronts, run_algorithm, StopReason};
use relayfront::harness::svg::{convergence_plot, schedule_plot, snapshot_plot, trace_plot};
use relayfront::harness::{
    convergence_report, read_convergence_csv, write_convergence_csv, RunConfig,
};
use relayfront::hysteresis::Sign;
use relayfront::pde::{check_invariants, run as simulate, Variables};
use relayfront::reduced::{reduced_trace_partial, ReducedOptions};
use relayfront::trace::{
    read_snapshot_csv, read_trace_csv, snapshot_file_name, write_events_csv, write_snapshot_csv,
    write_trace_csv, Trace,
};
use relayfront::{Error, ErrorClass, Result};

#[derive(Parser, Debug)]
#[command(
    name = "relayfront",
    version,
    about = "Front formation in reaction-diffusion with distributed relays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recursive schedule of front times s_n and depths y_n
    Asymptotics {
        #[command(flatten)]
        keys: Keys,
    },
    /// Full simulation: trace, events and density snapshots
    Simulate {
        #[command(flatten)]
        keys: Keys,
        /// Integrate the untransformed nutrient equations
        #[arg(long)]
        original: bool,
    },
    /// Reduced phase equations chained into a w(t) trace
    Reduced {
        #[command(flatten)]
        keys: Keys,
    },
    /// Convergence table over a sweep of D
    Compare {
        #[command(flatten)]
        keys: Keys,
    },
    /// SVG figure from files written by the other commands
    Plot {
        #[command(flatten)]
        keys: Keys,
        #[arg(long, value_enum)]
        kind: PlotKind,
        /// Output file; defaults to <out_dir>/<kind>.svg
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        log_x: bool,
        #[arg(long)]
        log_y: bool,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PlotKind {
    Schedule,
    Trace,
    Snapshots,
    Convergence,
}

impl PlotKind {
    fn name(self) -> &'static str {
        match self {
            PlotKind::Schedule => "schedule",
            PlotKind::Trace => "trace",
            PlotKind::Snapshots => "snapshots",
            PlotKind::Convergence => "convergence",
        }
    }
}

/// Configuration file plus one flag per key; flags win over the file.
#[derive(Args, Debug, Default)]
struct Keys {
    /// `key = value` configuration file
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Extra `key=value` override, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long = "x-lo", allow_hyphen_values = true)]
    x_lo: Option<String>,
    #[arg(long = "x-hi", allow_hyphen_values = true)]
    x_hi: Option<String>,
    /// Diffusion coefficient or comma-separated list
    #[arg(long = "D", allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long = "v0", allow_hyphen_values = true)]
    v0: Option<String>,
    #[arg(long = "w0", allow_hyphen_values = true)]
    w0: Option<String>,
    /// gaussian or uniform
    #[arg(long = "u0-profile")]
    u0_profile: Option<String>,
    #[arg(long = "u0-sigma", allow_hyphen_values = true)]
    u0_sigma: Option<String>,
    /// Initial configuration as `sign;x1,x2,...`
    #[arg(long = "r0", allow_hyphen_values = true)]
    r0: Option<String>,
    #[arg(long = "T", allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long = "M", allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long = "dt-max", allow_hyphen_values = true)]
    dt_max: Option<String>,
    #[arg(long = "sample-dt", allow_hyphen_values = true)]
    sample_dt: Option<String>,
    #[arg(long = "snapshots", allow_hyphen_values = true)]
    snapshots: Option<String>,
    #[arg(long = "n-max", allow_hyphen_values = true)]
    n_max: Option<String>,
    #[arg(long = "horizon", allow_hyphen_values = true)]
    horizon: Option<String>,
    /// Fronts followed by reduced, compare
    #[arg(long = "N", allow_hyphen_values = true)]
    n: Option<String>,
    /// reduced, pde or both, comma-separated
    #[arg(long = "tiers")]
    tiers: Option<String>,
    #[arg(long = "z-tol", allow_hyphen_values = true)]
    z_tol: Option<String>,
    #[arg(long = "quad-tol", allow_hyphen_values = true)]
    quad_tol: Option<String>,
    #[arg(long = "root-tol", allow_hyphen_values = true)]
    root_tol: Option<String>,
    #[arg(long = "golden-tol", allow_hyphen_values = true)]
    golden_tol: Option<String>,
    #[arg(long = "seed")]
    seed: Option<String>,
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
}

impl Keys {
    fn load(&self) -> Result<(RunConfig, PathBuf)> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::parse(
                &fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
            )?,
            None => RunConfig::new(),
        };
        let flags = [
            ("x_lo", &self.x_lo),
            ("x_hi", &self.x_hi),
            ("D", &self.d),
            ("v0", &self.v0),
            ("w0", &self.w0),
            ("u0.profile", &self.u0_profile),
            ("u0.sigma", &self.u0_sigma),
            ("r0", &self.r0),
            ("T", &self.t),
            ("M", &self.m),
            ("dt_max", &self.dt_max),
            ("sample_dt", &self.sample_dt),
            ("snapshots", &self.snapshots),
            ("n_max", &self.n_max),
            ("horizon", &self.horizon),
            ("N", &self.n),
            ("tiers", &self.tiers),
            ("z_tol", &self.z_tol),
            ("quad_tol", &self.quad_tol),
            ("root_tol", &self.root_tol),
            ("golden_tol", &self.golden_tol),
            ("seed", &self.seed),
        ];
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        let out_dir = match &self.out_dir {
            Some(dir) => dir.clone(),
            None => cfg.out_dir(),
        };
        fs::create_dir_all(&out_dir)
            .map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
        Ok((cfg, out_dir))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_trace_files(trace: &Trace, dir: &Path, prefix: &str) -> Result<()> {
    write_trace_csv(
        &trace.rows,
        create(&dir.join(format!("{prefix}trace.csv")))?,
    )?;
    write_events_csv(
        &trace.events,
        create(&dir.join(format!("{prefix}events.csv")))?,
    )?;
    for snap in &trace.snapshots {
        write_snapshot_csv(snap, create(&dir.join(snapshot_file_name(snap.t)))?)?;
    }
    Ok(())
}

fn asymptotics(keys: &Keys) -> Result<()> {
    let (cfg, dir) = keys.load()?;
    cfg.validate()?;
    let schedule = run_algorithm(
        cfg.x_lo()?,
        cfg.x_hi()?,
        cfg.horizon()?,
        cfg.n_max()?,
        &cfg.algorithm_options()?,
    )?;
    write_schedule_csv(
        &schedule_rows(&schedule),
        create(&dir.join("schedule.csv"))?,
    )?;
    for r in &schedule.records {
        println!(
            "n={} case={} s_n={:.10} y_n={:.10}",
            r.n, r.case, r.s_n, r.y_n
        );
    }
    match &schedule.stop {
        StopReason::IndexLimit => {}
        StopReason::Horizon { n, s_n } => println!("stopped: s_{n} = {s_n} beyond horizon"),
        StopReason::Terminated { n, diagnostic } => println!("terminated at n={n}: {diagnostic}"),
    }
    if cfg.get("D").is_some() {
        let mut preds = Vec::new();
        for d in cfg.d_list()? {
            preds.extend(predict_fronts(&schedule, d)?);
        }
        write_predictions_csv(&preds, create(&dir.join("predictions.csv"))?)?;
    }
    Ok(())
}

fn simulate_cmd(keys: &Keys, original: bool) -> Result<()> {
    let (cfg, dir) = keys.load()?;
    cfg.validate()?;
    let params = cfg.model_params(cfg.single_d()?, None)?;
    let vars = if original {
        Variables::Original
    } else {
        Variables::Transformed
    };
    let (trace, state) = simulate(&params, vars)?;
    write_trace_files(&trace, &dir, "")?;
    println!(
        "t={} v={:e} w={} fronts={} events={}",
        state.t,
        state.v,
        state.w,
        state.config.fronts().len(),
        trace.events.len()
    );
    let report = check_invariants(&trace, &params);
    if !report.ok() {
        return Err(Error::Invariant(report.violations.join("; ")));
    }
    Ok(())
}

fn reduced_cmd(keys: &Keys) -> Result<()> {
    let (cfg, dir) = keys.load()?;
    cfg.validate()?;
    let d = cfg.single_d()?;
    let n = cfg.n_fronts()?;
    let schedule = run_algorithm(
        cfg.x_lo()?,
        cfg.x_hi()?,
        cfg.horizon()?,
        cfg.n_max()?.max(n),
        &cfg.algorithm_options()?,
    )?;
    let run = reduced_trace_partial(&schedule, d, n, Sign::Plus, &ReducedOptions::default())?;
    write_trace_files(&run.trace, &dir, "reduced_")?;
    for f in &run.fronts {
        println!(
            "n={} t_n={:.10} x_n={:.10} y_hat={:.10}",
            f.n, f.t_n, f.x_n, f.y_hat
        );
    }
    match run.failure {
        Some((_, e)) => Err(e),
        None => Ok(()),
    }
}

fn compare(keys: &Keys) -> Result<()> {
    let (cfg, dir) = keys.load()?;
    let report = convergence_report(&cfg)?;
    write_convergence_csv(&report, create(&dir.join("convergence.csv"))?)?;
    for r in &report.rows {
        println!(
            "{} n={} D={:e} err_t={:e} err_y={:e} {}",
            r.tier.name(),
            r.n,
            r.d,
            r.err_t,
            r.err_y,
            r.status
        );
    }
    for (tier, n) in report.non_monotone() {
        println!("non-monotone: {} n={n}", tier.name());
    }
    Ok(())
}

fn snapshot_time(path: &Path) -> Result<f64> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.strip_prefix("u_"))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            Error::Parse(format!(
                "{}: expected a u_<t>.csv file name",
                path.display()
            ))
        })
}

fn plot(
    keys: &Keys,
    kind: PlotKind,
    output: Option<&Path>,
    log_x: bool,
    log_y: bool,
    inputs: &[PathBuf],
) -> Result<()> {
    let (cfg, dir) = keys.load()?;
    let svg = match kind {
        PlotKind::Schedule => {
            let rows = read_schedule_csv(open(&inputs[0])?)?;
            let d = if cfg.get("D").is_some() {
                Some(cfg.single_d()?)
            } else {
                None
            };
            schedule_plot(&rows, d)?
        }
        PlotKind::Trace => {
            let (x_lo, x_hi) = (cfg.x_lo()?, cfg.x_hi()?);
            let mut traces = Vec::new();
            for p in inputs {
                traces.push((
                    p.display().to_string(),
                    read_trace_csv(x_lo, x_hi, open(p)?)?,
                ));
            }
            trace_plot(&traces)?
        }
        PlotKind::Snapshots => {
            let mut snaps = Vec::new();
            for p in inputs {
                snaps.push(read_snapshot_csv(snapshot_time(p)?, open(p)?)?);
            }
            snaps.sort_by(|a, b| a.t.total_cmp(&b.t));
            snapshot_plot(&snaps, log_y)?
        }
        PlotKind::Convergence => {
            convergence_plot(&read_convergence_csv(open(&inputs[0])?)?, log_x)?
        }
    };
    let path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dir.join(format!("{}.svg", kind.name())));
    fs::write(&path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn report_error(kind: &str, class: &str, message: &str) {
    let record = serde_json::json!({ "error": kind, "class": class, "message": message });
    eprintln!("{record}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            report_error(
                "usage",
                "usage",
                text.lines()
                    .next()
                    .unwrap_or("")
                    .trim_start_matches("error: "),
            );
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Asymptotics { keys } => asymptotics(keys),
        Command::Simulate { keys, original } => simulate_cmd(keys, *original),
        Command::Reduced { keys } => reduced_cmd(keys),
        Command::Compare { keys } => compare(keys),
        Command::Plot {
            keys,
            kind,
            output,
            log_x,
            log_y,
            inputs,
        } => plot(keys, *kind, output.as_deref(), *log_x, *log_y, inputs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (class, code) = match e.class() {
                ErrorClass::Usage => ("usage", 1),
                ErrorClass::Numeric => ("numeric", 2),
                ErrorClass::Invariant => ("invariant", 3),
            };
            report_error(e.kind(), class, &e.to_string());
            ExitCode::from(code)
        }
    }
}
