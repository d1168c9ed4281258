use thiserror::Error;

/// Errors raised by the simulator.
///
/// Numeric payloads are reported as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize a zero (or non-finite) vector")]
    DegenerateState,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionError { expected: usize, actual: usize },

    #[error("matrix is not unitary: max |U†U - I| entry is {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("operator is not Hermitian: deviation {deviation:e}")]
    HermiticityError { deviation: f64 },

    #[error("postselection is orthogonal to the initial state: |<f|i>| = {overlap:e}")]
    OrthogonalPostselection { overlap: f64 },

    #[error("postselected pointer state has vanishing norm {norm:e}")]
    PostselectionAnnihilated { norm: f64 },

    #[error("invalid parameter: {0}")]
    DomainError(String),

    #[error("null outcome has vanishing probability {survival:e}; the state is destroyed with certainty")]
    StateDestroyed { survival: f64 },

    #[error("negative postselection outcome has vanishing probability {probability:e}")]
    NullPostselection { probability: f64 },

    #[error("calibration invalid at index {index}: {reason}")]
    CalibrationError { index: usize, reason: String },

    #[error("analytic routes disagree: {first} vs {second}")]
    RouteMismatch { first: f64, second: f64 },

    #[error("no conditioning events among {n_samples} samples")]
    InsufficientStatistics { n_samples: u64, n_conditioning: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
