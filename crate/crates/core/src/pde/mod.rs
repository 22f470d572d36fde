//! Full simulator for the density, nutrient and input equations.

pub mod integrate;
pub mod params;
pub mod scheme;
pub mod state;

pub use crate::trace::detect_steady_fronts;
pub use integrate::{
    check_invariants, gaussian_tail_diagnostic, integrate, run, simulate_original, InvariantReport,
};
pub use params::{default_dt_max, default_sigma, ModelParams, U0Profile};
pub use scheme::{raw_step, step, RelayCache, StepEvent, StepOutcome};
pub use state::{SystemState, Variables};
