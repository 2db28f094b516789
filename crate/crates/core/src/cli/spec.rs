//! JSON problem description read by `vibro run`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{plan_samples, FockVector, Sampling, DEFAULT_CONFIDENCE};
use crate::gaussian::{doktorov_to_circuit, DoktorovSpec, GaussianCircuit, UnitaryMatrix};
use crate::linalg::{c, CMat, C64};
use crate::spectra::{SpectralGrid, WeightVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    GaussianExact,
    FockEstimate,
    FockSqueezedEstimate,
    Oracle,
    Peaks,
    FiniteTemperature,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::GaussianExact => "gaussian-exact",
            Mode::FockEstimate => "fock-estimate",
            Mode::FockSqueezedEstimate => "fock-squeezed-estimate",
            Mode::Oracle => "oracle",
            Mode::Peaks => "peaks",
            Mode::FiniteTemperature => "finite-temperature",
        }
    }

    pub fn is_estimator(self) -> bool {
        matches!(self, Mode::FockEstimate | Mode::FockSqueezedEstimate | Mode::Peaks)
    }
}

/// Complex number as `[re, im]`.
pub type Pair = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CircuitSpec {
    /// `U D(α) S(r0)` given directly; `unitary` is row-major.
    Raw {
        unitary: Vec<Pair>,
        r0: Vec<f64>,
        #[serde(default)]
        alpha: Option<Vec<Pair>>,
    },
    Doktorov {
        omega_initial: Vec<f64>,
        omega_final: Vec<f64>,
        duschinsky: Vec<Pair>,
        delta: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum EstimatorSpec {
    Budget { epsilon: f64, confidence: f64 },
    Fixed { n_samples: usize, #[serde(default, skip_serializing_if = "Option::is_none")] confidence: Option<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureSpec {
    /// Two-mode squeezing per mode; thermal occupation `sinh² s`.
    pub two_mode_squeezing: Vec<f64>,
    /// Weights of the initial-state quanta; default: the final weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_weights: Option<Vec<u64>>,
    /// Thermal quanta per mode kept inside the window.
    pub thermal_cutoff: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeaksSpec {
    pub t: usize,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub buckets: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    /// Size estimator samples from the tolerance at this confidence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub mode: Mode,
    pub circuit: CircuitSpec,
    pub weights: Vec<u64>,
    pub omega_max: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_fock: Option<Vec<usize>>,
    /// Absent: exhaustive evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Photon cutoff of the Gaussian oracle; absent: raised until the mass deficit is below 1e-8.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<TemperatureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peaks: Option<PeaksSpec>,
}

/// A schema violation, with the JSON path of the offending field when known.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecError {
    pub field: Option<String>,
    pub message: String,
}

impl SpecError {
    fn at(field: &str, err: impl std::fmt::Display) -> Self {
        SpecError { field: Some(field.to_string()), message: err.to_string() }
    }
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> std::result::Result<Self, SpecError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: ProblemSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            SpecError { field: (path != ".").then_some(path), message: e.into_inner().to_string() }
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn modes(&self) -> usize {
        self.weights.len()
    }

    fn validate(&self) -> std::result::Result<(), SpecError> {
        WeightVector::new(self.weights.clone()).map_err(|e| SpecError::at("weights", e))?;
        self.circuit().map_err(|e| SpecError::at("circuit", e))?;
        if let Some(n) = &self.input_fock {
            Error::check_len("input_fock", self.modes(), n.len()).map_err(|e| SpecError::at("input_fock", e))?;
        }
        match self.estimator {
            Some(EstimatorSpec::Budget { epsilon, confidence }) => {
                plan_samples(epsilon, confidence).map_err(|e| SpecError::at("estimator", e))?;
            }
            Some(EstimatorSpec::Fixed { n_samples, confidence }) => {
                let conf = confidence.unwrap_or(DEFAULT_CONFIDENCE);
                if n_samples == 0 || !(conf > 0.0 && conf < 1.0) {
                    return Err(SpecError::at("estimator", "n_samples must be ≥ 1 and confidence in (0, 1)"));
                }
            }
            None => {}
        }
        if let Some(t) = &self.temperature {
            Error::check_len("two_mode_squeezing", self.modes(), t.two_mode_squeezing.len())
                .map_err(|e| SpecError::at("temperature.two_mode_squeezing", e))?;
            if let Some(wi) = &t.initial_weights {
                WeightVector::new(wi.clone())
                    .and_then(|w| Error::check_len("initial_weights", self.modes(), w.len()))
                    .map_err(|e| SpecError::at("temperature.initial_weights", e))?;
            }
        }
        Ok(())
    }

    pub fn weight_vector(&self) -> Result<WeightVector> {
        WeightVector::new(self.weights.clone())
    }

    pub fn grid(&self) -> SpectralGrid {
        SpectralGrid::new(self.omega_max)
    }

    pub fn fock_input(&self) -> FockVector {
        FockVector::new(self.input_fock.clone().unwrap_or_else(|| vec![0; self.modes()]))
    }

    pub fn circuit(&self) -> Result<GaussianCircuit> {
        let m = self.modes();
        match &self.circuit {
            CircuitSpec::Raw { unitary, r0, alpha } => {
                let u = unitary_from_pairs(unitary, m)?;
                let alpha = match alpha {
                    Some(a) => a.iter().map(|p| c(p[0], p[1])).collect(),
                    None => vec![c(0.0, 0.0); m],
                };
                GaussianCircuit::new(u, r0.clone(), alpha)
            }
            CircuitSpec::Doktorov { omega_initial, omega_final, duschinsky, delta } => {
                let u = unitary_from_pairs(duschinsky, m)?;
                let spec = DoktorovSpec::new(omega_initial.clone(), omega_final.clone(), u, delta.clone())?;
                doktorov_to_circuit(&spec)
            }
        }
    }

    /// Monte Carlo settings for estimator routes; `Exhaustive` when unset.
    pub fn sampling(&self, seed: u64) -> Result<Sampling> {
        Ok(match self.estimator {
            None => Sampling::Exhaustive,
            Some(EstimatorSpec::Budget { epsilon, confidence }) => {
                Sampling::MonteCarlo { n_samples: plan_samples(epsilon, confidence)?, seed, confidence }
            }
            Some(EstimatorSpec::Fixed { n_samples, confidence }) => {
                Sampling::MonteCarlo { n_samples, seed, confidence: confidence.unwrap_or(DEFAULT_CONFIDENCE) }
            }
        })
    }
}

fn unitary_from_pairs(pairs: &[Pair], m: usize) -> Result<UnitaryMatrix> {
    Error::check_len("unitary entries", m * m, pairs.len())?;
    let entries: Vec<C64> = pairs.iter().map(|p| c(p[0], p[1])).collect();
    UnitaryMatrix::new(CMat::from_row_slice(m, m, &entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUEEZER: &str = r#"{
        "mode": "gaussian-exact",
        "circuit": {"raw": {"unitary": [[1, 0]], "r0": [0.5]}},
        "weights": [1],
        "omega_max": 31
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let spec = ProblemSpec::from_json(SQUEEZER).unwrap();
        assert_eq!(spec.mode, Mode::GaussianExact);
        let again = ProblemSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn negative_weight_names_field() {
        let bad = SQUEEZER.replace("\"weights\": [1]", "\"weights\": [-1]");
        let err = ProblemSpec::from_json(&bad).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("weights[0]"));
    }

    #[test]
    fn two_circuit_forms_rejected() {
        let bad = SQUEEZER.replace(
            "\"circuit\": {\"raw\": {\"unitary\": [[1, 0]], \"r0\": [0.5]}}",
            "\"circuit\": {\"raw\": {\"unitary\": [[1, 0]], \"r0\": [0.5]}, \"doktorov\": {\"omega_initial\": [1], \"omega_final\": [1], \"duschinsky\": [[1, 0]], \"delta\": [0]}}",
        );
        assert!(ProblemSpec::from_json(&bad).is_err());
    }

    #[test]
    fn non_unitary_rejected() {
        let bad = SQUEEZER.replace("[[1, 0]]", "[[2, 0]]");
        assert_eq!(ProblemSpec::from_json(&bad).unwrap_err().field.as_deref(), Some("circuit"));
    }
}
