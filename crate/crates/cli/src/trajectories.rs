//! Monte Carlo trajectory runs compared with the analytic chain.

use log::warn;
use nwv_core::{calibrate_estimate, conditional_from_counts, nwv_exact, Error, TrajectorySampler};
use serde::Serialize;

use crate::config::Experiment;
use crate::discriminate::{EstimateReport, ProbabilityReport};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountsReport {
    pub n_samples: u64,
    pub first_click: u64,
    pub second_click: u64,
    pub both_silent: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryReport {
    pub seed: u64,
    pub counts: CountsReport,
    /// Empirical `P(M_w)`.
    pub p_click1: EstimateReport,
    /// Empirical `P(M̄_s)`.
    pub p_postselect_total: EstimateReport,
    /// Empirical `P(M_w | M̄_s)`; absent when nothing passed postselection.
    pub conditional: Option<EstimateReport>,
    pub nwv: Option<EstimateReport>,
    pub analytic: ProbabilityReport,
    pub analytic_nwv: f64,
}

fn frequency(hits: u64, n: u64) -> EstimateReport {
    let value = hits as f64 / n as f64;
    EstimateReport {
        value,
        std_error: (value * (1.0 - value) / n as f64).sqrt(),
        n_samples: n,
        n_conditioning: n,
    }
}

/// Samples the configured protocol. `seed_override` replaces the configured
/// seed.
pub fn run_trajectories(exp: &Experiment, seed_override: Option<u64>) -> Result<TrajectoryReport, CliError> {
    let mc = exp
        .montecarlo
        .ok_or_else(|| CliError::config("montecarlo", "the trajectories command requires a montecarlo block"))?;
    let seed = seed_override.unwrap_or(mc.seed);
    let u = exp.unitary.at(None);

    let analytic = nwv_exact(&exp.collapse, &exp.calibration, &exp.initial, &u, exp.postselect)?;
    let counts = TrajectorySampler::new(&exp.collapse, &exp.initial, &u, exp.postselect)?.run(mc.n_samples, seed);

    let (conditional, nwv) = match conditional_from_counts(&counts) {
        Ok(e) => (Some(e.into()), Some(calibrate_estimate(&e, &exp.calibration).into())),
        Err(Error::InsufficientStatistics { .. }) => {
            warn!("no trajectory passed postselection; conditional estimates omitted");
            (None, None)
        }
        Err(e) => return Err(e.into()),
    };

    Ok(TrajectoryReport {
        seed,
        counts: CountsReport {
            n_samples: counts.n_samples,
            first_click: counts.first_click,
            second_click: counts.second_click,
            both_silent: counts.both_silent,
        },
        p_click1: frequency(counts.first_click, counts.n_samples),
        p_postselect_total: frequency(counts.second_silent(), counts.n_samples),
        conditional,
        nwv,
        analytic: analytic.probabilities.into(),
        analytic_nwv: analytic.nwv_exact,
    })
}
