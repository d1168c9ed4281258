//! Monte Carlo sampling of the protocol's event tree, one trajectory at a time.
//!
//! This is a brute-force oracle for the analytic Bayes chain in
//! [`crate::protocol`]: it never evaluates a conditional probability, it only
//! draws single-shot outcomes and counts them.
//!
//! Each trajectory draws the first (partial-collapse) measurement. A click
//! destroys the system and the second measurement is recorded as a definite
//! no-click. Otherwise the null-outcome Kraus operator
//! `diag(√(1-p_m) e^{iφ_m})` and `U` are applied and the second measurement is
//! drawn from the Born rule on the postselected level.
//!
//! Random numbers come from ChaCha8 substreams: sample block `b` always uses
//! stream `b` of the seeded generator, so counts do not depend on how many
//! worker threads process the blocks.

use log::warn;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{StateVector, Unitary};
use crate::partial_collapse::{Calibration, PartialCollapseConfig};
use crate::scalar::Real;

/// Trajectories drawn from one random substream.
pub const BLOCK_SIZE: u64 = 1 << 16;

/// Below this many conditioning events the normal-approximation error bar is
/// unreliable and a warning is logged.
const SMALL_SAMPLE_WARNING: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrajectoryOutcome {
    /// `M_w` clicked (the system was destroyed).
    pub first_click: bool,
    /// `M_s` clicked. Always false after a first click.
    pub second_click: bool,
}

/// Outcome tallies over many trajectories.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrajectoryCounts {
    pub n_samples: u64,
    pub first_click: u64,
    pub second_click: u64,
    /// Neither measurement clicked.
    pub both_silent: u64,
}

impl TrajectoryCounts {
    fn record(&mut self, outcome: TrajectoryOutcome) {
        self.n_samples += 1;
        match (outcome.first_click, outcome.second_click) {
            (true, _) => self.first_click += 1,
            (false, true) => self.second_click += 1,
            (false, false) => self.both_silent += 1,
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            n_samples: self.n_samples + other.n_samples,
            first_click: self.first_click + other.first_click,
            second_click: self.second_click + other.second_click,
            both_silent: self.both_silent + other.both_silent,
        }
    }

    /// Trajectories whose second measurement did not click.
    pub fn second_silent(&self) -> u64 {
        self.first_click + self.both_silent
    }
}

/// Binomial estimate with its normal-approximation standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub n_conditioning: u64,
}

/// Branch probabilities of the event tree for one configuration, evaluated
/// once so that individual draws are cheap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySampler {
    first_click: f64,
    second_click_after_null: f64,
}

impl TrajectorySampler {
    pub fn new<T: Real>(
        cfg: &PartialCollapseConfig<T>,
        i: &StateVector<T>,
        u: &Unitary<T>,
        postselect: usize,
    ) -> Result<Self> {
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

        let mut first_click = 0.0;
        let mut survivor = Vec::with_capacity(dim);
        for ((alpha, p), phi) in i.amplitudes().iter().zip(cfg.probs()).zip(cfg.phases()) {
            let p = p.as_f64();
            let alpha = Complex::new(alpha.re.as_f64(), alpha.im.as_f64());
            first_click += p * alpha.norm_sqr();
            survivor.push(alpha * Complex::from_polar((1.0 - p).sqrt(), phi.as_f64()));
        }

        // An all-zero survivor means the null branch is never reached.
        let norm = survivor.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let second_click_after_null = if norm > 0.0 {
            let amplitude: Complex<f64> = survivor
                .iter()
                .enumerate()
                .map(|(c, z)| {
                    let entry = u.entry(postselect, c);
                    Complex::new(entry.re.as_f64(), entry.im.as_f64()) * z
                })
                .sum();
            (amplitude / norm).norm_sqr()
        } else {
            0.0
        };

        Ok(Self {
            first_click: first_click.clamp(0.0, 1.0),
            second_click_after_null: second_click_after_null.clamp(0.0, 1.0),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TrajectoryOutcome {
        if rng.random::<f64>() < self.first_click {
            return TrajectoryOutcome {
                first_click: true,
                second_click: false,
            };
        }
        TrajectoryOutcome {
            first_click: false,
            second_click: rng.random::<f64>() < self.second_click_after_null,
        }
    }

    fn run_block(&self, seed: u64, block: u64, len: u64) -> TrajectoryCounts {
        let mut rng = block_rng(seed, block);
        let mut counts = TrajectoryCounts::default();
        for _ in 0..len {
            counts.record(self.sample(&mut rng));
        }
        counts
    }

    /// Counts `n_samples` trajectories, splitting work across the current
    /// rayon pool. The result depends only on `seed` and `n_samples`.
    pub fn run(&self, n_samples: u64, seed: u64) -> TrajectoryCounts {
        let blocks = n_samples.div_ceil(BLOCK_SIZE);
        let per_block: Vec<TrajectoryCounts> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let len = BLOCK_SIZE.min(n_samples - b * BLOCK_SIZE);
                self.run_block(seed, b, len)
            })
            .collect();
        per_block.into_iter().fold(TrajectoryCounts::default(), TrajectoryCounts::merge)
    }

    /// Sequence of individual outcomes, reproducible from `seed`.
    pub fn outcomes(&self, n_samples: u64, seed: u64) -> Vec<TrajectoryOutcome> {
        let blocks = n_samples.div_ceil(BLOCK_SIZE);
        (0..blocks)
            .into_par_iter()
            .flat_map_iter(|b| {
                let len = BLOCK_SIZE.min(n_samples - b * BLOCK_SIZE);
                let mut rng = block_rng(seed, b);
                (0..len).map(move |_| self.sample(&mut rng)).collect::<Vec<_>>()
            })
            .collect()
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Draws a single trajectory of the event tree.
pub fn sample_trajectory<T: Real, R: Rng + ?Sized>(
    cfg: &PartialCollapseConfig<T>,
    i: &StateVector<T>,
    u: &Unitary<T>,
    postselect: usize,
    rng: &mut R,
) -> Result<TrajectoryOutcome> {
    Ok(TrajectorySampler::new(cfg, i, u, postselect)?.sample(rng))
}

fn binomial(successes: u64, trials: u64, n_samples: u64) -> Result<EstimateWithError> {
    if trials == 0 {
        return Err(Error::InsufficientStatistics {
            n_samples,
            n_conditioning: 0,
        });
    }
    if trials < SMALL_SAMPLE_WARNING {
        warn!("only {trials} conditioning events; the standard error is unreliable");
    }
    let value = successes as f64 / trials as f64;
    Ok(EstimateWithError {
        value,
        std_error: (value * (1.0 - value) / trials as f64).sqrt(),
        n_samples,
        n_conditioning: trials,
    })
}

/// Empirical `P(M_w | M̄_s)` from `counts`.
pub fn conditional_from_counts(counts: &TrajectoryCounts) -> Result<EstimateWithError> {
    binomial(counts.first_click, counts.second_silent(), counts.n_samples)
}

/// Empirical `P(M_w | M̄_s)` over `n_samples` trajectories.
pub fn estimate_conditional<T: Real>(
    cfg: &PartialCollapseConfig<T>,
    i: &StateVector<T>,
    u: &Unitary<T>,
    postselect: usize,
    n_samples: u64,
    seed: u64,
) -> Result<EstimateWithError> {
    if n_samples == 0 {
        return Err(Error::DomainError("at least one sample is required".into()));
    }
    let counts = TrajectorySampler::new(cfg, i, u, postselect)?.run(n_samples, seed);
    conditional_from_counts(&counts)
}

/// Calibrates an estimate of `P(M_w | M̄_s)` into a null weak value.
pub fn calibrate_estimate<T: Real>(estimate: &EstimateWithError, cal: &Calibration<T>) -> EstimateWithError {
    let scale = cal.scale().as_f64();
    EstimateWithError {
        value: (estimate.value - cal.offset().as_f64()) / scale,
        std_error: estimate.std_error / scale.abs(),
        ..*estimate
    }
}

/// Empirical null weak value over `n_samples` trajectories.
pub fn estimate_nwv<T: Real>(
    cfg: &PartialCollapseConfig<T>,
    cal: &Calibration<T>,
    i: &StateVector<T>,
    u: &Unitary<T>,
    postselect: usize,
    n_samples: u64,
    seed: u64,
) -> Result<EstimateWithError> {
    let raw = estimate_conditional(cfg, i, u, postselect, n_samples, seed)?;
    Ok(calibrate_estimate(&raw, cal))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_6;

    use super::*;

    #[test]
    fn no_tunneling_on_postselected_level_always_clicks_second() {
        let cfg = PartialCollapseConfig::new(vec![0.0, 0.0]).unwrap();
        let i = StateVector::basis(2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let o = sample_trajectory(&cfg, &i, &Unitary::identity(2), 1, &mut rng).unwrap();
            assert_eq!(o, TrajectoryOutcome { first_click: false, second_click: true });
        }
    }

    #[test]
    fn certain_destruction() {
        let cfg = PartialCollapseConfig::new(vec![1.0, 1.0]).unwrap();
        let i = StateVector::qubit(0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let o = sample_trajectory(&cfg, &i, &Unitary::identity(2), 0, &mut rng).unwrap();
            assert_eq!(o, TrajectoryOutcome { first_click: true, second_click: false });
        }
        let e = estimate_conditional(&cfg, &i, &Unitary::identity(2), 0, 1000, 3).unwrap();
        assert_eq!((e.value, e.std_error), (1.0, 0.0));
    }

    #[test]
    fn no_tunneling_estimate_is_zero() {
        let cfg = PartialCollapseConfig::new(vec![0.0, 0.0]).unwrap();
        let e = estimate_conditional(&cfg, &StateVector::qubit(0.5), &Unitary::identity(2), 1, 1000, 4).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn zero_conditioning_events() {
        let cfg = PartialCollapseConfig::new(vec![0.0, 0.0]).unwrap();
        let i = StateVector::basis(2, 1).unwrap();
        assert_eq!(
            estimate_conditional(&cfg, &i, &Unitary::identity(2), 1, 500, 5),
            Err(Error::InsufficientStatistics { n_samples: 500, n_conditioning: 0 })
        );
    }

    #[test]
    fn first_click_frequency_matches() {
        let cfg = PartialCollapseConfig::new(vec![0.0, 0.2]).unwrap();
        let sampler = TrajectorySampler::new(&cfg, &StateVector::qubit(FRAC_PI_6), &Unitary::identity(2), 1).unwrap();
        let n = 200_000;
        let counts = sampler.run(n, 6);
        let freq = counts.first_click as f64 / n as f64;
        let sigma = (0.05 * 0.95 / n as f64).sqrt();
        assert!((freq - 0.05).abs() < 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn calibration_sign_flip_negates() {
        let cfg = PartialCollapseConfig::new(vec![0.0, 0.2]).unwrap();
        let i = StateVector::qubit(FRAC_PI_6);
        let u = Unitary::identity(2);
        let a = estimate_nwv(&cfg, &Calibration::new(0.2, 0.0).unwrap(), &i, &u, 1, 10_000, 7).unwrap();
        let b = estimate_nwv(&cfg, &Calibration::new(-0.2, 0.0).unwrap(), &i, &u, 1, 10_000, 7).unwrap();
        assert_eq!(a.value, -b.value);
        assert_eq!(a.std_error, b.std_error);
    }

    #[test]
    fn blocks_partition_the_samples() {
        let cfg = PartialCollapseConfig::new(vec![0.1, 0.2]).unwrap();
        let sampler = TrajectorySampler::new(&cfg, &StateVector::qubit(0.3), &Unitary::identity(2), 0).unwrap();
        let n = 2 * BLOCK_SIZE + 17;
        let counts = sampler.run(n, 8);
        assert_eq!(counts.n_samples, n);
        assert_eq!(counts.first_click + counts.second_click + counts.both_silent, n);
        assert_eq!(sampler.outcomes(n, 8).len() as u64, n);
    }
}
