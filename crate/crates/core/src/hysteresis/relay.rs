use std::fmt;

/// Output of a two-state relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    /// `Plus` for nonnegative `v`.
    pub fn of(v: f64) -> Sign {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-1",
            Sign::Plus => "+1",
        })
    }
}

/// Non-ideal relay with thresholds `-x` and `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarRelay {
    pub x: f64,
    pub state: Sign,
}

impl ScalarRelay {
    pub fn new(x: f64, state: Sign) -> Self {
        Self { x, state }
    }

    /// Switching is inclusive: `w == x` turns the relay on, `w == -x` turns it off.
    pub fn update(self, w: f64) -> Self {
        let state = if w >= self.x {
            Sign::Plus
        } else if w <= -self.x {
            Sign::Minus
        } else {
            self.state
        };
        Self { x: self.x, state }
    }
}

pub fn relay_update(relay: ScalarRelay, w: f64) -> ScalarRelay {
    relay.update(w)
}
