//! Run configuration, cross-tier comparison and plotting.

pub mod config;
pub mod report;
pub mod svg;

pub use config::{RunConfig, Tier, KEYS, OUT_DIR_ENV};
pub use report::{
    convergence_report, pde_horizon, read_convergence_csv, write_convergence_csv,
    ConvergenceReport, ConvergenceRow, Decay,
};
