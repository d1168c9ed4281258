//! JSON experiment configuration.
//!
//! [`ExperimentConfig`] mirrors the file format one to one and round-trips
//! through serde unchanged. [`ExperimentConfig::resolve`] validates it and
//! builds the simulator values, reporting problems with the dotted path of
//! the offending field.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};
use std::fs;
use std::path::{Path, PathBuf};

use nwv_core::{
    calibration_for, Calibration, CalibrationMode, CollapseConfig, Complex, State, Unitary64,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dim: usize,
    /// Amplitudes as `[re, im]` pairs; normalized on load.
    pub initial_state: Vec<[f64; 2]>,
    pub tunneling: TunnelingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
    pub unitary: UnitarySpec,
    pub postselect_index: usize,
    pub calibration: CalibrationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<MonteCarloSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<OutputSpec>,
}

/// Either `probs`, or `rates` together with `time`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TunnelingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

/// Either an explicit `matrix` of `[re, im]` entries (row-major) or a qubit
/// rotation angle `qubit_gamma`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitarySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit_gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum CalibrationSpec {
    Dominant { index: usize },
    Subspace { k: usize },
    Explicit {
        scale: f64,
        #[serde(default)]
        offset: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSpec {
    pub n_samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// Evolution between the two measurements.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitaryChoice {
    Fixed(Unitary64),
    /// Qubit rotation by this angle; sweeps vary it.
    QubitGamma(f64),
}

impl UnitaryChoice {
    pub fn at(&self, gamma: Option<f64>) -> Unitary64 {
        match (self, gamma) {
            (_, Some(g)) | (&Self::QubitGamma(g), None) => Unitary64::qubit_rotation(g),
            (Self::Fixed(u), None) => u.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSweep {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl GammaSweep {
    /// Evenly spaced angles, `from` and `to` included exactly.
    pub fn grid(&self) -> Vec<f64> {
        match self.steps {
            0 => vec![],
            1 => vec![self.from],
            n => {
                let step = (self.to - self.from) / (n - 1) as f64;
                (0..n)
                    .map(|k| if k == n - 1 { self.to } else { self.from + k as f64 * step })
                    .collect()
            }
        }
    }
}

/// A validated configuration in simulator types.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub initial: State,
    pub collapse: CollapseConfig,
    pub unitary: UnitaryChoice,
    pub postselect: usize,
    pub calibration: Calibration<f64>,
    pub sweep: Option<GammaSweep>,
    pub montecarlo: Option<MonteCarloSpec>,
}

fn complex(pair: &[f64; 2]) -> Complex<f64> {
    Complex::new(pair[0], pair[1])
}

fn check_finite(path: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(k) => Err(CliError::config(format!("{path}[{k}]"), "must be finite")),
        None => Ok(()),
    }
}

fn check_len(path: &str, actual: usize, dim: usize) -> Result<(), CliError> {
    if actual == dim {
        Ok(())
    } else {
        Err(CliError::config(path, format!("expected {dim} entries, got {actual}")))
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Reference qubit sweep: `|i⟩ = cos(π/6)|0⟩ + sin(π/6)|1⟩`, `p = (0, p1)`,
    /// postselection against `|1⟩` after `U(γ)`, γ over `[-π/2, π/2]` in 721
    /// steps.
    pub fn reference_qubit_sweep(p1: f64) -> Self {
        Self {
            dim: 2,
            initial_state: vec![[FRAC_PI_6.cos(), 0.0], [FRAC_PI_6.sin(), 0.0]],
            tunneling: TunnelingSpec {
                probs: Some(vec![0.0, p1]),
                ..Default::default()
            },
            phases: None,
            unitary: UnitarySpec {
                matrix: None,
                qubit_gamma: Some(0.0),
            },
            postselect_index: 1,
            calibration: CalibrationSpec::Dominant { index: 1 },
            sweep: Some(SweepSpec {
                parameter: "gamma".into(),
                from: -FRAC_PI_2,
                to: FRAC_PI_2,
                steps: 721,
            }),
            montecarlo: None,
            outputs: None,
        }
    }

    /// Validates every field and builds the simulator values.
    pub fn resolve(&self) -> Result<Experiment, CliError> {
        let dim = self.dim;
        if dim < 2 {
            return Err(CliError::config("dim", format!("must be at least 2, got {dim}")));
        }

        check_len("initial_state", self.initial_state.len(), dim)?;
        for (k, pair) in self.initial_state.iter().enumerate() {
            check_finite(&format!("initial_state[{k}]"), pair)?;
        }
        let initial = State::normalize(self.initial_state.iter().map(complex).collect())
            .map_err(|e| CliError::config("initial_state", e.to_string()))?;

        let phases = match &self.phases {
            Some(phases) => {
                check_len("phases", phases.len(), dim)?;
                check_finite("phases", phases)?;
                phases.clone()
            }
            None => vec![0.0; dim],
        };
        let collapse = self.resolve_tunneling(phases)?;

        let unitary = self.resolve_unitary()?;

        if self.postselect_index >= dim {
            return Err(CliError::config(
                "postselect_index",
                format!("must be below dim = {dim}, got {}", self.postselect_index),
            ));
        }

        let calibration = match self.calibration {
            CalibrationSpec::Dominant { index } => calibration_for(&collapse, CalibrationMode::DominantState(index))
                .map_err(|e| CliError::config("calibration.index", e.to_string()))?,
            CalibrationSpec::Subspace { k } => calibration_for(&collapse, CalibrationMode::Subspace(k))
                .map_err(|e| CliError::config("calibration.k", e.to_string()))?,
            CalibrationSpec::Explicit { scale, offset } => {
                Calibration::new(scale, offset).map_err(|e| CliError::config("calibration.scale", e.to_string()))?
            }
        };

        let sweep = match &self.sweep {
            None => None,
            Some(s) => {
                if s.parameter != "gamma" {
                    return Err(CliError::config(
                        "sweep.parameter",
                        format!("only \"gamma\" can be swept, got {:?}", s.parameter),
                    ));
                }
                if !matches!(unitary, UnitaryChoice::QubitGamma(_)) {
                    return Err(CliError::config("sweep", "a gamma sweep requires unitary.qubit_gamma"));
                }
                if s.steps == 0 {
                    return Err(CliError::config("sweep.steps", "must be at least 1"));
                }
                check_finite("sweep.from", &[s.from])?;
                check_finite("sweep.to", &[s.to])?;
                Some(GammaSweep {
                    from: s.from,
                    to: s.to,
                    steps: s.steps,
                })
            }
        };

        if let Some(mc) = &self.montecarlo {
            if mc.n_samples == 0 {
                return Err(CliError::config("montecarlo.n_samples", "must be at least 1"));
            }
        }

        Ok(Experiment {
            initial,
            collapse,
            unitary,
            postselect: self.postselect_index,
            calibration,
            sweep,
            montecarlo: self.montecarlo,
        })
    }

    fn resolve_tunneling(&self, phases: Vec<f64>) -> Result<CollapseConfig, CliError> {
        let dim = self.dim;
        let t = &self.tunneling;
        match (&t.probs, &t.rates) {
            (Some(probs), None) => {
                if t.time.is_some() {
                    return Err(CliError::config("tunneling.time", "only valid together with rates"));
                }
                check_len("tunneling.probs", probs.len(), dim)?;
                if let Some(k) = probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
                    return Err(CliError::config(
                        format!("tunneling.probs[{k}]"),
                        format!("must lie in [0, 1], got {}", probs[k]),
                    ));
                }
                CollapseConfig::with_phases(probs.clone(), phases)
                    .map_err(|e| CliError::config("tunneling.probs", e.to_string()))
            }
            (None, Some(rates)) => {
                let time = t
                    .time
                    .ok_or_else(|| CliError::config("tunneling.time", "required together with rates"))?;
                check_len("tunneling.rates", rates.len(), dim)?;
                if let Some(k) = rates.iter().position(|r| !(*r >= 0.0)) {
                    return Err(CliError::config(
                        format!("tunneling.rates[{k}]"),
                        format!("must be nonnegative, got {}", rates[k]),
                    ));
                }
                if !(time >= 0.0) {
                    return Err(CliError::config("tunneling.time", format!("must be nonnegative, got {time}")));
                }
                CollapseConfig::from_rates(rates, time, Some(phases))
                    .map_err(|e| CliError::config("tunneling.rates", e.to_string()))
            }
            (Some(_), Some(_)) => Err(CliError::config("tunneling", "give either probs or rates, not both")),
            (None, None) => Err(CliError::config("tunneling", "one of probs or rates is required")),
        }
    }

    fn resolve_unitary(&self) -> Result<UnitaryChoice, CliError> {
        let dim = self.dim;
        match (&self.unitary.matrix, self.unitary.qubit_gamma) {
            (Some(rows), None) => {
                check_len("unitary.matrix", rows.len(), dim)?;
                for (r, row) in rows.iter().enumerate() {
                    check_len(&format!("unitary.matrix[{r}]"), row.len(), dim)?;
                    for (c, pair) in row.iter().enumerate() {
                        check_finite(&format!("unitary.matrix[{r}][{c}]"), pair)?;
                    }
                }
                let rows = rows.iter().map(|row| row.iter().map(complex).collect()).collect();
                Unitary64::from_rows(rows)
                    .map(UnitaryChoice::Fixed)
                    .map_err(|e| CliError::config("unitary.matrix", e.to_string()))
            }
            (None, Some(gamma)) => {
                if dim != 2 {
                    return Err(CliError::config("unitary.qubit_gamma", format!("requires dim = 2, got {dim}")));
                }
                check_finite("unitary.qubit_gamma", &[gamma])?;
                Ok(UnitaryChoice::QubitGamma(gamma))
            }
            (Some(_), Some(_)) => Err(CliError::config("unitary", "give either matrix or qubit_gamma, not both")),
            (None, None) => Err(CliError::config("unitary", "one of matrix or qubit_gamma is required")),
        }
    }

    /// Names of the fields (other than the initial state and run controls)
    /// that differ from `other`.
    pub fn shared_field_differences(&self, other: &Self) -> Vec<String> {
        let mut fields = Vec::new();
        if self.dim != other.dim {
            fields.push("dim".to_string());
        }
        if self.tunneling != other.tunneling {
            fields.push("tunneling".to_string());
        }
        if self.phases != other.phases {
            fields.push("phases".to_string());
        }
        if self.unitary != other.unitary {
            fields.push("unitary".to_string());
        }
        if self.postselect_index != other.postselect_index {
            fields.push("postselect_index".to_string());
        }
        if self.calibration != other.calibration {
            fields.push("calibration".to_string());
        }
        fields
    }
}
