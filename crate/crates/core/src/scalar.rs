//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the simulator is generic over (`f32` or `f64`).
///
/// Besides the arithmetic bounds, each implementation carries the numerical
/// tolerances used to validate states, unitaries and observables. The `f64`
/// values are the reference ones; the `f32` values are scaled to single
/// precision roundoff.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Allowed deviation of a state's squared norm from one.
    fn norm_tolerance() -> Self;
    /// Entrywise tolerance on `U†U = I`.
    fn unitary_tolerance() -> Self;
    /// Entrywise tolerance on `A = A†`, also used for discarding the
    /// imaginary residue of expectation values.
    fn hermitian_tolerance() -> Self;
    /// Entrywise tolerance on the reconstruction `Σ a_m |a_m⟩⟨a_m| = A`.
    fn eigen_tolerance() -> Self;
    /// Default smallest `|⟨f|i⟩|` treated as a non-orthogonal postselection.
    fn overlap_floor() -> Self;
    /// Smallest survival (or postselection) probability treated as non-zero.
    fn survival_floor() -> Self;

    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn norm_tolerance() -> Self {
        1e-12
    }
    fn unitary_tolerance() -> Self {
        1e-10
    }
    fn hermitian_tolerance() -> Self {
        1e-10
    }
    fn eigen_tolerance() -> Self {
        1e-8
    }
    fn overlap_floor() -> Self {
        1e-12
    }
    fn survival_floor() -> Self {
        1e-14
    }
}

impl Real for f32 {
    fn norm_tolerance() -> Self {
        1e-5
    }
    fn unitary_tolerance() -> Self {
        1e-5
    }
    fn hermitian_tolerance() -> Self {
        1e-5
    }
    fn eigen_tolerance() -> Self {
        1e-4
    }
    fn overlap_floor() -> Self {
        1e-6
    }
    fn survival_floor() -> Self {
        1e-6
    }
}
