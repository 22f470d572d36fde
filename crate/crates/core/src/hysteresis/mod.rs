//! Non-ideal relays, simple configurations and moments of a threshold density.

pub mod config;
pub mod density;
pub mod relay;

pub use config::{config_evolve, parse_config_line, SimpleConfiguration};
pub use density::{preisach_moment, relay_coefficients, tail_mass, total_mass, ThresholdDensity};
pub use relay::{relay_update, ScalarRelay, Sign};
