//! Analytic evaluation of the null-weak-value protocol.
//!
//! A partial-collapse measurement (`M_w`) is followed by a unitary `U` and a
//! strong projective measurement (`M_s`) on the basis level `m̃`. Runs with an
//! `M_s` click are discarded; the null weak value is the calibrated
//! probability of an `M_w` click given that `M_s` stayed silent:
//!
//! ```text
//! P(M_w | M̄_s) = P(M_w) / (P(M_w) + P(M̄_w) P(M̄_s | M̄_w))
//! ```
//!
//! using `P(M̄_s | M_w) = 1`: a system that clicked in the first measurement
//! is gone and can never trigger the second one.

use crate::error::{Error, Result};
use crate::hilbert::{StateVector, Unitary};
use crate::partial_collapse::{Calibration, PartialCollapseConfig};
use crate::scalar::Real;

/// Probabilities of one protocol configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolProbabilities<T> {
    /// `P(M_w)`
    pub p_click1: T,
    /// `P(M̄_w)`
    pub p_null1: T,
    /// `P(M̄_s | M̄_w)`. Set to one when the null branch has vanishing weight.
    pub p_nofail_given_null: T,
    /// `P(M̄_s)`
    pub p_postselect_total: T,
    /// `P(M_w | M̄_s)`
    pub p_click1_given_postselect: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NwvResult<T> {
    pub probabilities: ProtocolProbabilities<T>,
    /// `(P(M_w | M̄_s) - offset) / scale`
    pub nwv_exact: T,
    /// Weak partial-collapse approximation; qubits only, and absent when the
    /// postselection is orthogonal to the initial state.
    pub nwv_weak_limit: Option<T>,
}

/// Two-preparation discrimination signal `S̃ = P(M_w,δ | M̄_s,δ) - P(M_w,0 | M̄_s,0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminationSignal<T> {
    pub raw: T,
    /// `raw / scale`
    pub calibrated: T,
    pub reference: ProtocolProbabilities<T>,
    pub shifted: ProtocolProbabilities<T>,
}

fn check_setup<T: Real>(
    cfg: &PartialCollapseConfig<T>,
    i: &StateVector<T>,
    u: &Unitary<T>,
    postselect: usize,
) -> Result<()> {
    let dim = cfg.dim();
    for actual in [i.dim(), u.dim()] {
        if actual != dim {
            return Err(Error::DimensionError { expected: dim, actual });
        }
    }
    if postselect >= dim {
        return Err(Error::DomainError(format!(
            "postselection index {postselect} out of range for dimension {dim}"
        )));
    }
    Ok(())
}

/// Bayes chain of the protocol for initial state `i`, evolution `u` and
/// postselection level `postselect`.
pub fn run_analytic<T: Real>(
    cfg: &PartialCollapseConfig<T>,
    i: &StateVector<T>,
    u: &Unitary<T>,
    postselect: usize,
) -> Result<ProtocolProbabilities<T>> {
    check_setup(cfg, i, u, postselect)?;
    let p_click1 = cfg.click_probability(i)?;
    let p_null1 = cfg.survival_probability(i)?;

    let p_nofail_given_null = if p_null1 > T::survival_floor() {
        let evolved = u.apply(&cfg.backaction(i)?)?;
        let nofail: T = (0..evolved.dim())
            .filter(|&m| m != postselect)
            .map(|m| evolved.probability(m))
            .sum();
        nofail.min(T::one())
    } else {
        T::one()
    };

    let p_postselect_total = p_click1 + p_null1 * p_nofail_given_null;
    if !(p_postselect_total > T::survival_floor()) {
        return Err(Error::NullPostselection {
            probability: p_postselect_total.as_f64(),
        });
    }
    Ok(ProtocolProbabilities {
        p_click1,
        p_null1,
        p_nofail_given_null,
        p_postselect_total,
        p_click1_given_postselect: (p_click1 / p_postselect_total).min(T::one()),
    })
}

/// Exact null weak value.
///
/// With a zero calibration offset the result is cross-checked against the
/// second route `⟨Â⟩ / P(M̄_s)`, `Â` being the calibrated observable.
pub fn nwv_exact<T: Real>(
    cfg: &PartialCollapseConfig<T>,
    cal: &Calibration<T>,
    i: &StateVector<T>,
    u: &Unitary<T>,
    postselect: usize,
) -> Result<NwvResult<T>> {
    let probabilities = run_analytic(cfg, i, u, postselect)?;
    let nwv = cal.apply(probabilities.p_click1_given_postselect);

    if cal.offset() == T::zero() {
        let via_expectation = cal.observable(cfg).expectation(i)? / probabilities.p_postselect_total;
        let tol = T::hermitian_tolerance() * T::one().max(nwv.abs());
        if !((via_expectation - nwv).abs() <= tol) {
            return Err(Error::RouteMismatch {
                first: nwv.as_f64(),
                second: via_expectation.as_f64(),
            });
        }
    }

    let nwv_weak_limit = if cfg.dim() == 2 {
        let silent = StateVector::basis(2, 1 - postselect)?;
        let f = u.adjoint().apply(&silent)?;
        nwv_weak_limit_qubit(i, &f).ok()
    } else {
        None
    };

    Ok(NwvResult {
        probabilities,
        nwv_exact: nwv,
        nwv_weak_limit,
    })
}

/// Weak partial-collapse limit `⟨i|n̂₁|i⟩ / |⟨f|i⟩|²` for a qubit, where `f`
/// is the state the postselection keeps (`U†|0⟩` when postselecting against
/// `|1⟩`).
///
/// Leading order in `p₁` when `p₀ = 0`; for `p₀ ≠ 0` it is only accurate while
/// `p₀ ≪ p₁`.
pub fn nwv_weak_limit_qubit<T: Real>(i: &StateVector<T>, f: &StateVector<T>) -> Result<T> {
    nwv_weak_limit_qubit_with_floor(i, f, T::overlap_floor())
}

/// [`nwv_weak_limit_qubit`] with an explicit floor on `|⟨f|i⟩|²`.
pub fn nwv_weak_limit_qubit_with_floor<T: Real>(i: &StateVector<T>, f: &StateVector<T>, floor: T) -> Result<T> {
    for actual in [i.dim(), f.dim()] {
        if actual != 2 {
            return Err(Error::DimensionError { expected: 2, actual });
        }
    }
    let overlap_sqr = f.inner(i)?.norm_sqr();
    if !(overlap_sqr > floor) {
        return Err(Error::OrthogonalPostselection {
            overlap: overlap_sqr.sqrt().as_f64(),
        });
    }
    Ok(i.probability(1) / overlap_sqr)
}

/// `S̃` for telling `reference` and `shifted` preparations apart.
pub fn discrimination_signal<T: Real>(
    cfg: &PartialCollapseConfig<T>,
    cal: &Calibration<T>,
    reference: &StateVector<T>,
    shifted: &StateVector<T>,
    u: &Unitary<T>,
    postselect: usize,
) -> Result<DiscriminationSignal<T>> {
    let p0 = run_analytic(cfg, reference, u, postselect)?;
    let pd = run_analytic(cfg, shifted, u, postselect)?;
    let raw = pd.p_click1_given_postselect - p0.p_click1_given_postselect;
    Ok(DiscriminationSignal {
        raw,
        calibrated: raw / cal.scale(),
        reference: p0,
        shifted: pd,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

    use super::*;

    fn benchmark() -> (PartialCollapseConfig<f64>, StateVector<f64>, Unitary<f64>) {
        (
            PartialCollapseConfig::new(vec![0.0, 0.2]).unwrap(),
            StateVector::qubit(FRAC_PI_6),
            Unitary::identity(2),
        )
    }

    #[test]
    fn no_tunneling_means_no_conditional_click() {
        let cfg = PartialCollapseConfig::new(vec![0.0, 0.0]).unwrap();
        let p = run_analytic(&cfg, &StateVector::qubit(0.4), &Unitary::identity(2), 1).unwrap();
        assert_eq!(p.p_click1_given_postselect, 0.0);
    }

    #[test]
    fn surviving_excited_state_always_fails_postselection() {
        let cfg = PartialCollapseConfig::new(vec![0.0, 0.1]).unwrap();
        let i = StateVector::basis(2, 1).unwrap();
        let p = run_analytic(&cfg, &i, &Unitary::identity(2), 1).unwrap();
        assert_eq!(p.p_nofail_given_null, 0.0);
        assert_eq!(p.p_click1_given_postselect, 1.0);
    }

    #[test]
    fn benchmark_chain() {
        let (cfg, i, u) = benchmark();
        let p = run_analytic(&cfg, &i, &u, 1).unwrap();
        assert!((p.p_click1 - 0.05).abs() < 1e-15);
        assert!((p.p_nofail_given_null - 0.75 / 0.95).abs() < 1e-15);
        assert!((p.p_postselect_total - 0.8).abs() < 1e-15);
        assert!((p.p_click1_given_postselect - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn benchmark_nwv() {
        let (cfg, i, u) = benchmark();
        let cal = Calibration::new(0.2, 0.0).unwrap();
        let r = nwv_exact(&cfg, &cal, &i, &u, 1).unwrap();
        assert!((r.nwv_exact - 0.3125).abs() < 1e-15);
        // identity U, postselecting against |1⟩ keeps f = |0⟩
        assert!((r.nwv_weak_limit.unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn vacuous_conditioning_recovers_population() {
        let cfg = PartialCollapseConfig::new(vec![0.0, 0.1]).unwrap();
        let cal = Calibration::<f64>::new(0.1, 0.0).unwrap();
        let i = StateVector::basis(2, 1).unwrap();
        let r = nwv_exact(&cfg, &cal, &i, &Unitary::identity(2), 0).unwrap();
        assert_eq!(r.probabilities.p_nofail_given_null, 1.0);
        assert!((r.nwv_exact - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_amplitude_on_postselected_level_gives_unconditional_average() {
        let cfg = PartialCollapseConfig::new(vec![0.1, 0.3, 0.05]).unwrap();
        let cal = Calibration::<f64>::new(0.25, 0.05).unwrap();
        let i = StateVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let r = nwv_exact(&cfg, &cal, &i, &Unitary::identity(3), 1).unwrap();
        let unconditional = cal.apply(cfg.click_probability(&i).unwrap());
        assert!((r.nwv_exact - unconditional).abs() < 1e-15);
        assert!(r.nwv_weak_limit.is_none());
    }

    #[test]
    fn certain_click_branch() {
        let cfg = PartialCollapseConfig::new(vec![1.0, 1.0]).unwrap();
        let p = run_analytic(&cfg, &StateVector::qubit(0.3), &Unitary::identity(2), 0).unwrap();
        assert_eq!(p.p_click1_given_postselect, 1.0);
        assert_eq!(p.p_nofail_given_null, 1.0);
    }

    #[test]
    fn impossible_postselection_errors() {
        let cfg = PartialCollapseConfig::new(vec![0.0, 0.0]).unwrap();
        let i = StateVector::basis(2, 1).unwrap();
        assert!(matches!(
            run_analytic(&cfg, &i, &Unitary::identity(2), 1),
            Err(Error::NullPostselection { .. })
        ));
    }

    #[test]
    fn setup_errors() {
        let (cfg, i, u) = benchmark();
        assert!(run_analytic(&cfg, &i, &u, 2).is_err());
        assert!(matches!(
            run_analytic(&cfg, &i, &Unitary::identity(3), 1),
            Err(Error::DimensionError { .. })
        ));
    }

    #[test]
    fn weak_limit_examples() {
        let i = StateVector::qubit(FRAC_PI_6);
        assert!((nwv_weak_limit_qubit(&i, &i).unwrap() - 0.25).abs() < 1e-15);
        let f = StateVector::basis(2, 0).unwrap();
        assert!((nwv_weak_limit_qubit(&i, &f).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // blows up as 1/cos²(γ + π/6) towards γ = π/3
        for eps in [1e-2, 1e-3, 1e-4] {
            let gamma = FRAC_PI_3 - eps;
            let v = nwv_weak_limit_qubit(&i, &StateVector::qubit(-gamma)).unwrap();
            let expected = 0.25 / (gamma + FRAC_PI_6).cos().powi(2);
            assert!((v / expected - 1.0).abs() < 1e-9);
        }
        let orth = StateVector::from_real(&[-FRAC_PI_6.sin(), FRAC_PI_6.cos()]).unwrap();
        assert!(matches!(
            nwv_weak_limit_qubit(&i, &orth),
            Err(Error::OrthogonalPostselection { .. })
        ));
    }

    #[test]
    fn discrimination_examples() {
        let (cfg, i, u) = benchmark();
        let cal = Calibration::new(0.2, 0.0).unwrap();
        assert_eq!(discrimination_signal(&cfg, &cal, &i, &i, &u, 1).unwrap().raw, 0.0);

        let ground = StateVector::basis(2, 0).unwrap();
        let s = discrimination_signal(&cfg, &cal, &i, &ground, &u, 1).unwrap();
        assert!((s.raw + 0.0625).abs() < 1e-15);
        assert!((s.calibrated + 0.3125).abs() < 1e-15);

        let excited = StateVector::basis(2, 1).unwrap();
        let s = discrimination_signal(&cfg, &cal, &excited, &i, &u, 1).unwrap();
        assert!((s.raw + 0.9375).abs() < 1e-15);
    }
}
