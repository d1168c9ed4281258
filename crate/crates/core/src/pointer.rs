//! Standard weak values read on a Gaussian von Neumann pointer.
//!
//! The detector pointer starts in a Gaussian packet centred at `q0` with
//! position spread `delta`. An impulsive coupling `λ p̂ Â` displaces the packet
//! by `λ a_m` for each eigencomponent of the system. After postselecting the
//! system on `|f⟩`, the pointer is left in the superposition
//!
//! ```text
//! φ_f(q) = Σ_m c_m φ0(q - λ a_m),    c_m = ⟨f|a_m⟩⟨a_m|i⟩
//! ```
//!
//! whose mean position is evaluated exactly from Gaussian overlaps. In the
//! weak regime (`Δ ≫ λ max|a_m - a_n|`) the mean reduces to
//! `q0 + λ Re ⟨f|Â|i⟩/⟨f|i⟩`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hilbert::{Observable, StateVector};
use crate::scalar::Real;

/// Gaussian detector pointer with impulsive coupling strength `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPointer<T> {
    q0: T,
    delta: T,
    lambda: T,
}

impl<T: Real> GaussianPointer<T> {
    pub fn new(q0: T, delta: T, lambda: T) -> Result<Self> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(Error::DomainError(format!("pointer width must be positive, got {delta}")));
        }
        if !q0.is_finite() || !lambda.is_finite() {
            return Err(Error::DomainError("pointer position and coupling must be finite".into()));
        }
        Ok(Self { q0, delta, lambda })
    }

    pub fn q0(&self) -> T {
        self.q0
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: T) -> Self {
        Self { lambda, ..*self }
    }
}

/// Everything the weak-value protocol reports for one (A, i, f, pointer).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueResult<T> {
    pub wv: Complex<T>,
    pub pointer_mean_linear: T,
    pub pointer_mean_exact: T,
    /// `⟨f|i⟩`
    pub overlap: Complex<T>,
}

/// `⟨f|Â|i⟩ / ⟨f|i⟩` with the default overlap floor.
pub fn standard_wv<T: Real>(a: &Observable<T>, i: &StateVector<T>, f: &StateVector<T>) -> Result<Complex<T>> {
    standard_wv_with_floor(a, i, f, T::overlap_floor())
}

pub fn standard_wv_with_floor<T: Real>(
    a: &Observable<T>,
    i: &StateVector<T>,
    f: &StateVector<T>,
    overlap_floor: T,
) -> Result<Complex<T>> {
    let overlap = f.inner(i)?;
    if !(overlap.norm() > overlap_floor) {
        return Err(Error::OrthogonalPostselection {
            overlap: overlap.norm().as_f64(),
        });
    }
    Ok(a.matrix_element(f, i)? / overlap)
}

/// First-order pointer mean `q0 + λ Re(wv)`.
pub fn pointer_mean_linear<T: Real>(
    a: &Observable<T>,
    i: &StateVector<T>,
    f: &StateVector<T>,
    pointer: &GaussianPointer<T>,
) -> Result<T> {
    let wv = standard_wv(a, i, f)?;
    Ok(pointer.q0 + pointer.lambda * wv.re)
}

/// Exact mean position of the postselected pointer.
pub fn pointer_mean_exact<T: Real>(
    a: &Observable<T>,
    i: &StateVector<T>,
    f: &StateVector<T>,
    pointer: &GaussianPointer<T>,
) -> Result<T> {
    if a.dim() != i.dim() || a.dim() != f.dim() {
        return Err(Error::DimensionError {
            expected: a.dim(),
            actual: if a.dim() != i.dim() { i.dim() } else { f.dim() },
        });
    }
    let eigen = a.eigen();
    let weights = eigen
        .vectors
        .iter()
        .map(|v| Ok(f.inner(v)? * v.inner(i)?))
        .collect::<Result<Vec<Complex<T>>>>()?;
    let shifts: Vec<T> = eigen.values.iter().map(|&a_m| pointer.lambda * a_m).collect();

    // G_mn = exp(-(x_m - x_n)² / 8Δ²) is the overlap of two packets whose
    // probability densities have standard deviation Δ.
    let eight_var = T::lit(8.0) * pointer.delta * pointer.delta;
    let half = T::lit(0.5);
    let mut norm = Complex::<T>::zero();
    let mut first_moment = Complex::<T>::zero();
    for (m, (cm, xm)) in weights.iter().zip(&shifts).enumerate() {
        for (n, (cn, xn)) in weights.iter().zip(&shifts).enumerate() {
            let d = *xm - *xn;
            let g = if m == n { T::one() } else { (-(d * d) / eight_var).exp() };
            let w = cm.conj() * cn * g;
            norm = norm + w;
            first_moment = first_moment + w * (half * (*xm + *xn));
        }
    }

    if !(norm.re.max(T::zero()).sqrt() > T::survival_floor()) {
        return Err(Error::PostselectionAnnihilated {
            norm: norm.re.max(T::zero()).sqrt().as_f64(),
        });
    }
    Ok(pointer.q0 + first_moment.re / norm.re)
}

/// Complex weak value together with both pointer readouts.
pub fn weak_value<T: Real>(
    a: &Observable<T>,
    i: &StateVector<T>,
    f: &StateVector<T>,
    pointer: &GaussianPointer<T>,
) -> Result<WeakValueResult<T>> {
    let wv = standard_wv(a, i, f)?;
    Ok(WeakValueResult {
        wv,
        pointer_mean_linear: pointer.q0 + pointer.lambda * wv.re,
        pointer_mean_exact: pointer_mean_exact(a, i, f, pointer)?,
        overlap: f.inner(i)?,
    })
}
