//! Postselection-angle sweeps of the weak value and the null weak value.

use log::warn;
use nwv_core::{
    estimate_nwv, nwv_exact, nwv_weak_limit_qubit_with_floor, standard_wv, Error, Observable64, State,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, GammaSweep};
use crate::error::CliError;

/// Rows with `|⟨f|i⟩|` below this are flagged as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub wv_re: Option<f64>,
    pub wv_im: Option<f64>,
    pub nwv_weak_limit: Option<f64>,
    pub nwv_exact: Option<f64>,
    pub p_click1: Option<f64>,
    pub p_postselect_total: Option<f64>,
    pub mc_estimate: Option<f64>,
    pub mc_std_error: Option<f64>,
    pub diverged: bool,
}

impl SweepRow {
    fn diverged(gamma: f64) -> Self {
        Self {
            gamma,
            wv_re: None,
            wv_im: None,
            nwv_weak_limit: None,
            nwv_exact: None,
            p_click1: None,
            p_postselect_total: None,
            mc_estimate: None,
            mc_std_error: None,
            diverged: true,
        }
    }
}

/// SplitMix64 finalizer, used to give every sweep row its own seed.
pub(crate) fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn evaluate_row(exp: &Experiment, n1: &Observable64, gamma: f64, index: u64) -> Result<SweepRow, CliError> {
    let u = exp.unitary.at(Some(gamma));
    let silent = State::basis(2, 1 - exp.postselect)?;
    let f = u.adjoint().apply(&silent)?;
    if f.inner(&exp.initial)?.norm() < DIVERGENCE_THRESHOLD {
        return Ok(SweepRow::diverged(gamma));
    }

    let wv = standard_wv(n1, &exp.initial, &f)?;
    let floor = DIVERGENCE_THRESHOLD * DIVERGENCE_THRESHOLD;
    let weak_limit = nwv_weak_limit_qubit_with_floor(&exp.initial, &f, floor)?;
    let exact = nwv_exact(&exp.collapse, &exp.calibration, &exp.initial, &u, exp.postselect)?;

    let (mc_estimate, mc_std_error) = match exp.montecarlo {
        None => (None, None),
        Some(mc) => {
            let seed = mix_seed(mc.seed, index);
            match estimate_nwv(&exp.collapse, &exp.calibration, &exp.initial, &u, exp.postselect, mc.n_samples, seed) {
                Ok(e) => (Some(e.value), Some(e.std_error)),
                Err(Error::InsufficientStatistics { .. }) => {
                    warn!("gamma = {gamma}: no postselected trajectories, Monte Carlo columns left empty");
                    (None, None)
                }
                Err(e) => return Err(e.into()),
            }
        }
    };

    Ok(SweepRow {
        gamma,
        wv_re: Some(wv.re),
        wv_im: Some(wv.im),
        nwv_weak_limit: Some(weak_limit),
        nwv_exact: Some(exact.nwv_exact),
        p_click1: Some(exact.probabilities.p_click1),
        p_postselect_total: Some(exact.probabilities.p_postselect_total),
        mc_estimate,
        mc_std_error,
        diverged: false,
    })
}

/// Evaluates every grid point of `sweep`. Rows come back in grid order
/// regardless of how the work is scheduled.
pub fn run_sweep_over(exp: &Experiment, sweep: &GammaSweep) -> Result<Vec<SweepRow>, CliError> {
    let n1 = Observable64::projector(2, 1)?;
    sweep
        .grid()
        .into_par_iter()
        .enumerate()
        .map(|(k, gamma)| evaluate_row(exp, &n1, gamma, k as u64))
        .collect()
}

/// Runs the sweep block of a resolved configuration.
pub fn run_sweep(exp: &Experiment) -> Result<Vec<SweepRow>, CliError> {
    let sweep = exp
        .sweep
        .ok_or_else(|| CliError::config("sweep", "the sweep command requires a sweep block"))?;
    run_sweep_over(exp, &sweep)
}
