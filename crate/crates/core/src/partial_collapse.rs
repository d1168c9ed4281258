//! Weak partial-collapse measurement.
//!
//! Each level `|m⟩` tunnels out to a classical detector with probability
//! `p_m` during the measurement window. A click destroys the system; a null
//! outcome leaves it in the renormalized state
//!
//! ```text
//! |i_p⟩ = Σ_m α_m √(1 - p_m) e^{iφ_m} |m⟩ / √P(no click)
//! ```
//!
//! On average the detector measures `M̂_w = Σ_l p_l |l⟩⟨l|`, which a
//! [`Calibration`] maps onto an observable of the system alone.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{Observable, StateVector};
use crate::scalar::Real;

/// `p_m = 1 - exp(-Γ_m t)` for every rate.
pub fn probabilities_from_rates<T: Real>(rates: &[T], t: T) -> Result<Vec<T>> {
    if !(t >= T::zero()) {
        return Err(Error::DomainError(format!("time window must be nonnegative, got {t}")));
    }
    rates
        .iter()
        .enumerate()
        .map(|(m, &rate)| {
            if !(rate >= T::zero()) {
                return Err(Error::DomainError(format!("rate {m} must be nonnegative, got {rate}")));
            }
            let exposure = rate * t;
            if exposure.is_nan() {
                return Err(Error::DomainError(format!("rate {m} times window is undefined")));
            }
            Ok(-(-exposure).exp_m1())
        })
        .collect()
}

/// Tunneling probabilities and induced phases of the partial-collapse step.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialCollapseConfig<T> {
    probs: Vec<T>,
    phases: Vec<T>,
}

impl<T: Real> PartialCollapseConfig<T> {
    /// Config with all phases zero.
    pub fn new(probs: Vec<T>) -> Result<Self> {
        let phases = vec![T::zero(); probs.len()];
        Self::with_phases(probs, phases)
    }

    pub fn with_phases(probs: Vec<T>, phases: Vec<T>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::DomainError(format!(
                "dimension must be at least 2, got {}",
                probs.len()
            )));
        }
        if phases.len() != probs.len() {
            return Err(Error::DimensionError {
                expected: probs.len(),
                actual: phases.len(),
            });
        }
        if let Some(m) = probs.iter().position(|p| !(*p >= T::zero() && *p <= T::one())) {
            return Err(Error::DomainError(format!(
                "probability {m} must lie in [0, 1], got {}",
                probs[m]
            )));
        }
        if let Some(m) = phases.iter().position(|phi| !phi.is_finite()) {
            return Err(Error::DomainError(format!("phase {m} must be finite")));
        }
        Ok(Self { probs, phases })
    }

    pub fn from_rates(rates: &[T], t: T, phases: Option<Vec<T>>) -> Result<Self> {
        let probs = probabilities_from_rates(rates, t)?;
        let phases = phases.unwrap_or_else(|| vec![T::zero(); probs.len()]);
        Self::with_phases(probs, phases)
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    fn check_dim(&self, s: &StateVector<T>) -> Result<()> {
        if s.dim() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionError {
                expected: self.dim(),
                actual: s.dim(),
            })
        }
    }

    /// `P(M_w) = Σ p_m |α_m|²`.
    pub fn click_probability(&self, s: &StateVector<T>) -> Result<T> {
        self.check_dim(s)?;
        let p: T = self
            .probs
            .iter()
            .zip(s.amplitudes())
            .map(|(p, a)| *p * a.norm_sqr())
            .sum();
        Ok(p.max(T::zero()).min(T::one()))
    }

    /// `P(M̄_w) = Σ (1 - p_m) |α_m|²`, summed directly so it keeps full
    /// relative precision when clicks are almost certain.
    pub fn survival_probability(&self, s: &StateVector<T>) -> Result<T> {
        self.check_dim(s)?;
        let p: T = self
            .probs
            .iter()
            .zip(s.amplitudes())
            .map(|(p, a)| (T::one() - *p) * a.norm_sqr())
            .sum();
        Ok(p.max(T::zero()).min(T::one()))
    }

    /// Unnormalized null-outcome amplitudes `α_m √(1-p_m) e^{iφ_m}`.
    pub(crate) fn null_amplitudes(&self, s: &StateVector<T>) -> Vec<Complex<T>> {
        self.probs
            .iter()
            .zip(&self.phases)
            .zip(s.amplitudes())
            .map(|((p, phi), a)| a * Complex::from_polar((T::one() - *p).sqrt(), *phi))
            .collect()
    }

    /// State left behind by a null (no-click) outcome.
    pub fn backaction(&self, s: &StateVector<T>) -> Result<StateVector<T>> {
        let survival = self.survival_probability(s)?;
        if !(survival > T::survival_floor()) {
            return Err(Error::StateDestroyed {
                survival: survival.as_f64(),
            });
        }
        StateVector::normalize(self.null_amplitudes(s))
    }

    /// `M̂_w = Σ_l p_l |l⟩⟨l|`.
    pub fn mw_observable(&self) -> Observable<T> {
        Observable::diagonal(&self.probs).expect("config dimension is at least 2")
    }
}

/// Affine map `(x - offset) / scale` from detector click probabilities to
/// expectation values of a system observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration<T> {
    scale: T,
    offset: T,
}

impl<T: Real> Calibration<T> {
    pub fn new(scale: T, offset: T) -> Result<Self> {
        if !(scale.abs() > T::zero()) || !scale.is_finite() || !offset.is_finite() {
            return Err(Error::CalibrationError {
                index: 0,
                reason: format!("scale must be finite and nonzero, got {scale}"),
            });
        }
        Ok(Self { scale, offset })
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn apply(&self, value: T) -> T {
        (value - self.offset) / self.scale
    }

    /// The calibrated system observable `(M̂_w - offset) / scale`.
    pub fn observable(&self, cfg: &PartialCollapseConfig<T>) -> Observable<T> {
        cfg.mw_observable().affine(self.scale, self.offset)
    }
}

/// How the detector observable is mapped onto a system observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMode {
    /// `|m⟩⟨m| ≈ M̂_w / p_m`, for a level that tunnels much faster than the rest.
    DominantState(usize),
    /// `Σ_{l≤k} |l⟩⟨l| = (M̂_w - p') / (p - p')` when levels `0..=k` share
    /// probability `p` and the remaining levels share `p'`.
    Subspace(usize),
}

const STRUCTURE_TOLERANCE: f64 = 1e-12;

/// Calibration for `cfg` under `mode`.
pub fn calibration_for<T: Real>(cfg: &PartialCollapseConfig<T>, mode: CalibrationMode) -> Result<Calibration<T>> {
    let probs = cfg.probs();
    let dim = probs.len();
    match mode {
        CalibrationMode::DominantState(m) => {
            if m >= dim {
                return Err(Error::CalibrationError {
                    index: m,
                    reason: format!("level out of range for dimension {dim}"),
                });
            }
            if !(probs[m] > T::zero()) {
                return Err(Error::CalibrationError {
                    index: m,
                    reason: "dominant level has zero tunneling probability".into(),
                });
            }
            Calibration::new(probs[m], T::zero())
        }
        CalibrationMode::Subspace(k) => {
            if k + 1 >= dim {
                return Err(Error::CalibrationError {
                    index: k,
                    reason: format!("subspace must leave a nonempty complement in dimension {dim}"),
                });
            }
            let tol = T::lit(STRUCTURE_TOLERANCE);
            let inner = probs[0];
            let outer = probs[k + 1];
            if let Some(j) = (0..=k).find(|&j| (probs[j] - inner).abs() > tol) {
                return Err(Error::CalibrationError {
                    index: j,
                    reason: format!("probability {} differs from subspace value {inner}", probs[j]),
                });
            }
            if let Some(j) = (k + 1..dim).find(|&j| (probs[j] - outer).abs() > tol) {
                return Err(Error::CalibrationError {
                    index: j,
                    reason: format!("probability {} differs from complement value {outer}", probs[j]),
                });
            }
            if !((inner - outer).abs() > tol) {
                return Err(Error::CalibrationError {
                    index: k + 1,
                    reason: "subspace and complement share the same probability".into(),
                });
            }
            Calibration::new(inner - outer, outer)
        }
    }
}
