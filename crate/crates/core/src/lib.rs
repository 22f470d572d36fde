//! Reaction-diffusion with a continuum of hysteretic relays.
//!
//! Three tiers model the same front-formation process: a PDE simulator
//! ([`pde`]), scalar phase equations ([`reduced`]) and the recursive
//! asymptotic constants ([`asymptotics`]). [`harness`] compares them.

pub mod asymptotics;
pub mod error;
pub mod harness;
pub mod hysteresis;
pub mod numerics;
pub mod pde;
pub mod reduced;
pub mod trace;

pub use error::{Error, ErrorClass, Result};
