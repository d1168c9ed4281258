//! Experiment harness for the null weak value simulator.
//!
//! Reads JSON experiment configurations, runs postselection-angle sweeps,
//! discrimination reports and Monte Carlo trajectory runs, and writes the
//! results as CSV or JSON.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod discriminate;
pub mod emit;
pub mod error;
pub mod sweep;
pub mod trajectories;

pub use config::{Experiment, ExperimentConfig, Format};
pub use discriminate::{run_discrimination, DiscriminationReport};
pub use error::CliError;
pub use sweep::{run_sweep, SweepRow};
pub use trajectories::{run_trajectories, TrajectoryReport};
