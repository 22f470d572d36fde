use std::fmt;

use crate::error::{Error, Result};
use crate::hysteresis::relay::Sign;
use crate::numerics::fmt17;

/// Piecewise-constant relay state on `[x_lo, x_hi]` with alternating signs.
///
/// Fronts are the interior break points. A relay sitting exactly on a front
/// belongs to the interval on its left, so each interval is `(x_{k-1}, x_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleConfiguration {
    x_lo: f64,
    x_hi: f64,
    fronts: Vec<f64>,
    rightmost: Sign,
}

fn check_domain(x_lo: f64, x_hi: f64) -> Result<()> {
    if !(x_lo > 0.0 && x_lo < x_hi && x_hi < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "threshold domain must satisfy 0 < x_lo < x_hi < 1/2, got [{x_lo}, {x_hi}]"
        )));
    }
    Ok(())
}

impl SimpleConfiguration {
    pub fn uniform(x_lo: f64, x_hi: f64, sign: Sign) -> Result<Self> {
        check_domain(x_lo, x_hi)?;
        Ok(Self {
            x_lo,
            x_hi,
            fronts: Vec::new(),
            rightmost: sign,
        })
    }

    /// Builds a configuration from explicit fronts, which must be strictly
    /// increasing and strictly inside the domain.
    pub fn from_fronts(x_lo: f64, x_hi: f64, fronts: Vec<f64>, rightmost: Sign) -> Result<Self> {
        check_domain(x_lo, x_hi)?;
        for (i, &f) in fronts.iter().enumerate() {
            if !f.is_finite() || f <= x_lo || f >= x_hi {
                return Err(Error::InvalidParameter(format!(
                    "front {f} outside ({x_lo}, {x_hi})"
                )));
            }
            if i > 0 && fronts[i - 1] >= f {
                return Err(Error::InvalidParameter(
                    "fronts must be strictly increasing".into(),
                ));
            }
        }
        let mut c = Self {
            x_lo,
            x_hi,
            fronts,
            rightmost,
        };
        c.normalize();
        Ok(c)
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn fronts(&self) -> &[f64] {
        &self.fronts
    }

    pub fn rightmost(&self) -> Sign {
        self.rightmost
    }

    pub fn merge_tol(&self) -> f64 {
        1e-14 * (self.x_hi - self.x_lo)
    }

    /// Sign of the relay with threshold `x`.
    pub fn sign_at(&self, x: f64) -> Sign {
        let right_of = self.fronts.len() - self.fronts.partition_point(|&f| f < x);
        if right_of % 2 == 0 {
            self.rightmost
        } else {
            self.rightmost.flip()
        }
    }

    /// Sign on the first interval.
    pub fn leftmost(&self) -> Sign {
        if self.fronts.len() % 2 == 0 {
            self.rightmost
        } else {
            self.rightmost.flip()
        }
    }

    /// The intervals `(a, b, sign)` from left to right.
    pub fn intervals(&self) -> Vec<(f64, f64, Sign)> {
        let mut out = Vec::with_capacity(self.fronts.len() + 1);
        let mut a = self.x_lo;
        let mut s = self.leftmost();
        for &f in &self.fronts {
            out.push((a, f, s));
            a = f;
            s = s.flip();
        }
        out.push((a, self.x_hi, s));
        out
    }

    /// Sets every relay with threshold `x <= level` to `sign`.
    fn set_prefix(&mut self, level: f64, sign: Sign) {
        let tol = self.merge_tol();
        if level < self.x_lo {
            return;
        }
        if level >= self.x_hi - tol {
            self.fronts.clear();
            self.rightmost = sign;
            return;
        }
        let keep_from = self.fronts.partition_point(|&f| f <= level);
        self.fronts.drain(..keep_from);
        let above = self.leftmost();
        if above != sign {
            self.fronts.insert(0, level);
        }
        self.normalize();
    }

    /// Applies a single input sample to every relay.
    pub fn apply_input(&mut self, w: f64) {
        if w >= self.x_lo {
            self.set_prefix(w, Sign::Plus);
        } else if w <= -self.x_lo {
            self.set_prefix(-w, Sign::Minus);
        }
    }

    /// Removes fronts that collide with each other or with the domain ends.
    fn normalize(&mut self) {
        let tol = self.merge_tol();
        while self.fronts.first().is_some_and(|&f| f - self.x_lo <= tol) {
            self.fronts.remove(0);
        }
        while self.fronts.last().is_some_and(|&f| self.x_hi - f <= tol) {
            self.fronts.pop();
            self.rightmost = self.rightmost.flip();
        }
        let mut i = 0;
        while i + 1 < self.fronts.len() {
            if self.fronts[i + 1] - self.fronts[i] <= tol {
                self.fronts.drain(i..i + 2);
                i = i.saturating_sub(1);
            } else {
                i += 1;
            }
        }
    }

    /// Serializes as `sign;x1,x2,...`.
    pub fn to_line(&self) -> String {
        let fronts: Vec<String> = self.fronts.iter().map(|&f| fmt17(f)).collect();
        format!("{};{}", self.rightmost, fronts.join(","))
    }

    pub fn from_line(x_lo: f64, x_hi: f64, line: &str) -> Result<Self> {
        let (sign, fronts) = parse_config_line(line)?;
        Self::from_fronts(x_lo, x_hi, fronts, sign)
    }
}

impl fmt::Display for SimpleConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

/// Parses `sign;x1,x2,...` without domain checks.
pub fn parse_config_line(line: &str) -> Result<(Sign, Vec<f64>)> {
    let (sign, rest) = line
        .trim()
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("configuration `{line}` lacks ';'")))?;
    let sign = match sign.trim() {
        "+1" | "1" => Sign::Plus,
        "-1" => Sign::Minus,
        other => return Err(Error::Parse(format!("bad configuration sign `{other}`"))),
    };
    let rest = rest.trim();
    let mut fronts = Vec::new();
    if !rest.is_empty() {
        for tok in rest.split(',') {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad front position `{tok}`")))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("non-finite front `{tok}`")));
            }
            fronts.push(v);
        }
    }
    Ok((sign, fronts))
}

/// Evolves a configuration along a monotone input path from `w_old` to `w_new`.
pub fn config_evolve(
    config: &SimpleConfiguration,
    w_old: f64,
    w_new: f64,
) -> Result<SimpleConfiguration> {
    if !w_old.is_finite() || !w_new.is_finite() {
        return Err(Error::Domain(format!(
            "non-finite input {w_old} -> {w_new}"
        )));
    }
    let mut c = config.clone();
    c.apply_input(w_old);
    c.apply_input(w_new);
    Ok(c)
}
