//! Signal for telling two preparations apart through the null protocol.

use nwv_core::{discrimination_signal, estimate_conditional, EstimateWithError, Probabilities};
use serde::Serialize;

use crate::config::{ExperimentConfig, MonteCarloSpec};
use crate::error::CliError;
use crate::sweep::mix_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityReport {
    pub p_click1: f64,
    pub p_null1: f64,
    pub p_nofail_given_null: f64,
    pub p_postselect_total: f64,
    pub p_click1_given_postselect: f64,
}

impl From<Probabilities> for ProbabilityReport {
    fn from(p: Probabilities) -> Self {
        Self {
            p_click1: p.p_click1,
            p_null1: p.p_null1,
            p_nofail_given_null: p.p_nofail_given_null,
            p_postselect_total: p.p_postselect_total,
            p_click1_given_postselect: p.p_click1_given_postselect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateReport {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub n_conditioning: u64,
}

impl From<EstimateWithError> for EstimateReport {
    fn from(e: EstimateWithError) -> Self {
        Self {
            value: e.value,
            std_error: e.std_error,
            n_samples: e.n_samples,
            n_conditioning: e.n_conditioning,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloSignal {
    pub reference: EstimateReport,
    pub shifted: EstimateReport,
    pub signal_raw: f64,
    pub signal_calibrated: f64,
    /// Quadrature sum of the two standard errors.
    pub std_error_raw: f64,
    pub std_error_calibrated: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscriminationReport {
    pub signal_raw: f64,
    pub signal_calibrated: f64,
    pub reference: ProbabilityReport,
    pub shifted: ProbabilityReport,
    pub montecarlo: Option<MonteCarloSignal>,
}

/// Compares the `reference` and `shifted` preparations. Both configurations
/// must agree on everything except the initial state and run controls.
///
/// Monte Carlo runs when either configuration has a `montecarlo` block. With
/// `seed_override` the two runs use seeds derived from it; otherwise each uses
/// its own configured seed.
pub fn run_discrimination(
    reference: &ExperimentConfig,
    shifted: &ExperimentConfig,
    seed_override: Option<u64>,
) -> Result<DiscriminationReport, CliError> {
    let differing = reference.shared_field_differences(shifted);
    if !differing.is_empty() {
        return Err(CliError::ConfigMismatch(differing));
    }
    let e0 = reference.resolve()?;
    let ed = shifted.resolve()?;
    let u = e0.unitary.at(None);

    let signal = discrimination_signal(&e0.collapse, &e0.calibration, &e0.initial, &ed.initial, &u, e0.postselect)?;

    let montecarlo = match (e0.montecarlo, ed.montecarlo) {
        (None, None) => None,
        (mc0, mcd) => {
            // A missing block borrows the other one with a decorrelated seed.
            let mc0 = mc0.unwrap_or_else(|| {
                let other = mcd.expect("one block present");
                MonteCarloSpec { seed: mix_seed(other.seed, 0), ..other }
            });
            let mcd = mcd.unwrap_or(MonteCarloSpec { seed: mix_seed(mc0.seed, 1), ..mc0 });
            let (seed0, seedd) = match seed_override {
                Some(s) => (mix_seed(s, 0), mix_seed(s, 1)),
                None => (mc0.seed, mcd.seed),
            };
            let r0 = estimate_conditional(&e0.collapse, &e0.initial, &u, e0.postselect, mc0.n_samples, seed0)?;
            let rd = estimate_conditional(&ed.collapse, &ed.initial, &u, ed.postselect, mcd.n_samples, seedd)?;
            let raw = rd.value - r0.value;
            let se = r0.std_error.hypot(rd.std_error);
            let scale = e0.calibration.scale();
            Some(MonteCarloSignal {
                reference: r0.into(),
                shifted: rd.into(),
                signal_raw: raw,
                signal_calibrated: raw / scale,
                std_error_raw: se,
                std_error_calibrated: se / scale.abs(),
            })
        }
    };

    Ok(DiscriminationReport {
        signal_raw: signal.raw,
        signal_calibrated: signal.calibrated,
        reference: signal.reference.into(),
        shifted: signal.shifted.into(),
        montecarlo,
    })
}
