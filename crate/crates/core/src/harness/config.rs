//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::asymptotics::AlgorithmOptions;
use crate::error::{Error, Result};
use crate::hysteresis::SimpleConfiguration;
use crate::pde::{default_dt_max, default_sigma, ModelParams, U0Profile};

/// Every key the configuration understands.
pub const KEYS: &[&str] = &[
    "x_lo",
    "x_hi",
    "D",
    "v0",
    "w0",
    "u0.profile",
    "u0.sigma",
    "r0",
    "T",
    "M",
    "dt_max",
    "sample_dt",
    "snapshots",
    "n_max",
    "horizon",
    "N",
    "tiers",
    "z_tol",
    "quad_tol",
    "root_tol",
    "golden_tol",
    "seed",
    "out_dir",
];

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "RELAYFRONT_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    Reduced,
    Pde,
}

impl Tier {
    pub fn name(&self) -> &'static str {
        match self {
            Tier::Reduced => "reduced",
            Tier::Pde => "pde",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "reduced" => Ok(Tier::Reduced),
            "pde" => Ok(Tier::Pde),
            other => Err(Error::Parse(format!("unknown tier `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", i + 1)))?;
            let k = k.trim();
            if cfg.entries.contains_key(k) {
                return Err(Error::Parse(format!("line {}: duplicate key `{k}`", i + 1)));
            }
            cfg.set(k, v.trim()).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::Parse(format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Writes the configuration back in file form.
    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => {
                let v: f64 = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("`{key}` is not a number: `{s}`")))?;
                if !v.is_finite() {
                    return Err(Error::Parse(format!("`{key}` must be finite")));
                }
                Ok(Some(v))
            }
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::Parse(format!("`{key}` is not a count: `{s}`"))),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(s) = self.get(key) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("`{key}` entry `{tok}` is not a number")))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("`{key}` entries must be finite")));
            }
            out.push(v);
        }
        Ok(Some(out))
    }

    pub fn x_lo(&self) -> Result<f64> {
        self.f64_or("x_lo", 0.01)
    }

    pub fn x_hi(&self) -> Result<f64> {
        self.f64_or("x_hi", 0.25)
    }

    /// Diffusion coefficients; an explicitly empty list is an error.
    pub fn d_list(&self) -> Result<Vec<f64>> {
        let list = self.list("D")?.unwrap_or_else(|| vec![1e-4]);
        if list.is_empty() {
            return Err(Error::InvalidParameter("the D list is empty".into()));
        }
        if let Some(d) = list.iter().find(|d| !(**d > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "D must be positive, got {d}"
            )));
        }
        Ok(list)
    }

    /// The single diffusion coefficient of a one-run command.
    pub fn single_d(&self) -> Result<f64> {
        let list = self.d_list()?;
        if list.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "expected one D value, got {}",
                list.len()
            )));
        }
        Ok(list[0])
    }

    pub fn n_max(&self) -> Result<usize> {
        self.usize_or("n_max", 10)
    }

    /// Number of fronts followed by the reduced and full tiers.
    pub fn n_fronts(&self) -> Result<usize> {
        let n = self.usize_or("N", 3)?;
        if n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        Ok(n)
    }

    /// Horizon of the asymptotic schedule.
    pub fn horizon(&self) -> Result<f64> {
        self.f64_or("horizon", 1e4)
    }

    pub fn seed(&self) -> Result<u64> {
        match self.get("seed") {
            None => Ok(0),
            Some(s) => s
                .parse()
                .map_err(|_| Error::Parse(format!("`seed` is not an integer: `{s}`"))),
        }
    }

    pub fn tiers(&self) -> Result<Vec<Tier>> {
        let Some(s) = self.get("tiers") else {
            return Ok(vec![Tier::Reduced, Tier::Pde]);
        };
        let mut out: Vec<Tier> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(Tier::parse)
            .collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::InvalidParameter("no tiers selected".into()));
        }
        Ok(out)
    }

    /// Output directory: the environment variable wins over the file.
    pub fn out_dir(&self) -> PathBuf {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        PathBuf::from(self.get("out_dir").unwrap_or("."))
    }

    pub fn algorithm_options(&self) -> Result<AlgorithmOptions> {
        let base = AlgorithmOptions::default();
        Ok(AlgorithmOptions {
            z_tol_factor: self.f64_or("z_tol", base.z_tol_factor)?,
            quad_tol: self.f64_or("quad_tol", base.quad_tol)?,
            root_rel_tol: self.f64_or("root_tol", base.root_rel_tol)?,
            golden_rel_tol: self.f64_or("golden_tol", base.golden_rel_tol)?,
            ..base
        })
    }

    /// Simulator parameters at diffusion `d`; `t_end` overrides `T` when given.
    pub fn model_params(&self, d: f64, t_end: Option<f64>) -> Result<ModelParams> {
        let x_lo = self.x_lo()?;
        let x_hi = self.x_hi()?;
        let t_end = match t_end {
            Some(t) => t,
            None => self.f64_or("T", 10.0)?,
        };
        let mut p = ModelParams::with_defaults(x_lo, x_hi, d, t_end)?;
        p.m = self.usize_or("M", p.m)?;
        if p.m < 2 {
            return Err(Error::InvalidParameter("M must be at least 2".into()));
        }
        p.dt_max = self
            .f64_opt("dt_max")?
            .unwrap_or_else(|| default_dt_max(x_lo, x_hi, p.m, d));
        p.v0 = self.f64_or("v0", p.v0)?;
        p.w0 = self.f64_or("w0", p.w0)?;
        p.u0 = match self.get("u0.profile").unwrap_or("gaussian") {
            "gaussian" => U0Profile::Gaussian {
                sigma: self.f64_or("u0.sigma", default_sigma(d))?,
            },
            "uniform" => U0Profile::Uniform,
            other => return Err(Error::Parse(format!("unknown u0.profile `{other}`"))),
        };
        if let Some(line) = self.get("r0") {
            p.r0 = SimpleConfiguration::from_line(x_lo, x_hi, line)?;
        }
        p.sample_dt = self.f64_or("sample_dt", t_end / 1000.0)?;
        p.snapshot_times = self.list("snapshots")?.unwrap_or_default();
        p.validate()?;
        Ok(p)
    }

    /// Checks every key that is present, so bad input fails before any run.
    pub fn validate(&self) -> Result<()> {
        for d in self.d_list()? {
            self.model_params(d, None)?;
        }
        self.n_max()?;
        self.n_fronts()?;
        self.horizon()?;
        self.seed()?;
        self.tiers()?;
        self.algorithm_options()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let mut c =
            RunConfig::parse("# run\nx_hi = 0.3  # upper\nD = 1e-3, 1e-4\n\nM=50\n").unwrap();
        assert_eq!(c.x_hi().unwrap(), 0.3);
        assert_eq!(c.d_list().unwrap(), vec![1e-3, 1e-4]);
        c.set("x_hi", "0.25").unwrap();
        assert_eq!(c.x_hi().unwrap(), 0.25);
        let p = c.model_params(1e-3, None).unwrap();
        assert_eq!(p.m, 50);
        assert!((p.w0 - (0.25 - 1e-3f64.powf(0.25))).abs() < 1e-15);
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::parse("bogus = 1").is_err());
        assert!(RunConfig::parse("x_lo 0.1").is_err());
        assert!(RunConfig::parse("x_lo = 1\nx_lo = 2").is_err());
        assert!(RunConfig::parse("D =").unwrap().d_list().is_err());
        assert!(RunConfig::parse("x_lo = 0.3").unwrap().validate().is_err());
        assert!(RunConfig::parse("tiers = ").unwrap().tiers().is_err());
        assert!(RunConfig::parse("M = abc").unwrap().validate().is_err());
    }
}
