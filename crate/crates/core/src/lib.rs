//! Simulation and analysis of two-step conditional quantum measurements.
//!
//! Two protocols are covered:
//!
//! * the standard weak value, read on a Gaussian von Neumann pointer and
//!   postselected on a final state ([`pointer`]);
//! * the null weak value, where a weak partial-collapse measurement
//!   ([`partial_collapse`]) is conditioned on a null outcome of a later strong
//!   measurement ([`protocol`]).
//!
//! [`trajectory`] samples the protocol's event tree shot by shot and serves as
//! an independent check of the analytic probabilities.
//!
//! Every numeric type is generic over [`Real`] (`f32` or `f64`). The aliases
//! below fix the scalar to `f64`, which is what the tolerances are tuned for.
//!
//! ```
//! use std::f64::consts::FRAC_PI_6;
//! use nwv_core::{nwv_exact, Calibration, CollapseConfig, State, Unitary64};
//!
//! # fn main() -> nwv_core::Result<()> {
//! let cfg = CollapseConfig::new(vec![0.0, 0.2])?;
//! let i = State::qubit(FRAC_PI_6);
//! let cal = Calibration::new(0.2, 0.0)?;
//! let r = nwv_exact(&cfg, &cal, &i, &Unitary64::identity(2), 1)?;
//! assert!((r.probabilities.p_click1_given_postselect - 0.0625).abs() < 1e-15);
//! assert!((r.nwv_exact - 0.3125).abs() < 1e-15);
//! # Ok(())
//! # }
//! ```

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod eigen;
pub mod error;
pub mod hilbert;
pub mod partial_collapse;
pub mod pointer;
pub mod protocol;
pub mod scalar;
pub mod trajectory;

pub use error::{Error, Result};
pub use hilbert::{Eigen, Observable, StateVector, Unitary};
pub use partial_collapse::{calibration_for, probabilities_from_rates, Calibration, CalibrationMode, PartialCollapseConfig};
pub use pointer::{pointer_mean_exact, pointer_mean_linear, standard_wv, weak_value, GaussianPointer, WeakValueResult};
pub use protocol::{
    discrimination_signal, nwv_exact, nwv_weak_limit_qubit, nwv_weak_limit_qubit_with_floor, run_analytic, DiscriminationSignal, NwvResult,
    ProtocolProbabilities,
};
pub use scalar::Real;
pub use trajectory::{
    calibrate_estimate, conditional_from_counts, estimate_conditional, estimate_nwv, sample_trajectory, EstimateWithError, TrajectoryCounts, TrajectoryOutcome,
    TrajectorySampler,
};

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type State = StateVector<f64>;
pub type Unitary64 = Unitary<f64>;
pub type Observable64 = Observable<f64>;
pub type Pointer = GaussianPointer<f64>;
pub type CollapseConfig = PartialCollapseConfig<f64>;
pub type Calibration64 = Calibration<f64>;
pub type Probabilities = ProtocolProbabilities<f64>;

pub type State32 = StateVector<f32>;
pub type Unitary32 = Unitary<f32>;
pub type Observable32 = Observable<f32>;
pub type CollapseConfig32 = PartialCollapseConfig<f32>;
