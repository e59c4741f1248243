//! TOML experiment configuration. Every key is optional; an empty file gives
//! the default experiment. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use fidecay::circuit::{compile_entangler, CircuitPlan, PulseParams};
use fidecay::experiment::{ExperimentSetup, Model, DEFAULT_ITERATION_DURATION, DEFAULT_N_MAX};
use fidecay::liouville::RelaxationRates;
use fidecay::noise::{default_rf_distribution, NoiseModel, RfDistribution, SimulationMode};
use fidecay::spincore::SpinSystem;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file {0} not found")]
    Missing(PathBuf),
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid value for `{field}`: {message}")]
    Invalid {
        field: &'static str,
        message: String,
    },
}

fn invalid(field: &'static str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field,
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModelSelection {
    Incoherent,
    Decoherent,
    #[default]
    Both,
}

impl ModelSelection {
    pub fn models(self) -> Vec<Model> {
        match self {
            ModelSelection::Incoherent => vec![Model::Incoherent],
            ModelSelection::Decoherent => vec![Model::Decoherent],
            ModelSelection::Both => vec![Model::Incoherent, Model::Decoherent],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Gate,
    Pulse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpinSystemConfig {
    /// Rotating-frame offsets in Hz, qubit 1 first.
    pub frequencies: Vec<f64>,
    /// Symmetric scalar couplings in Hz.
    pub couplings: Vec<Vec<f64>>,
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
}

impl Default for SpinSystemConfig {
    fn default() -> Self {
        let sys = SpinSystem::default_three_spin();
        Self {
            frequencies: sys.frequencies().to_vec(),
            couplings: sys
                .couplings()
                .rows()
                .into_iter()
                .map(|r| r.to_vec())
                .collect(),
            t1: sys.t1().to_vec(),
            t2: sys.t2().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitDistribution {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Either the string `"default"` or a table of points and weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionConfig {
    Preset(String),
    Explicit(ExplicitDistribution),
}

impl Default for DistributionConfig {
    fn default() -> Self {
        DistributionConfig::Preset("default".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub model: ModelSelection,
    pub n_max: usize,
    pub relaxation: bool,
    pub mode: Mode,
    /// Seconds per entangler iteration.
    pub iteration_duration: f64,
    pub noisy_prep_readout: bool,
    /// Evaluate ensemble members serially.
    pub deterministic: bool,
    pub spin_system: SpinSystemConfig,
    pub rf_distribution: DistributionConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelSelection::default(),
            n_max: DEFAULT_N_MAX,
            relaxation: true,
            mode: Mode::default(),
            iteration_duration: DEFAULT_ITERATION_DURATION,
            noisy_prep_readout: false,
            deterministic: true,
            spin_system: SpinSystemConfig::default(),
            rf_distribution: DistributionConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.setup()?;
        Ok(cfg)
    }

    pub fn spin_system(&self) -> Result<SpinSystem, ConfigError> {
        let s = &self.spin_system;
        let n = s.frequencies.len();
        if s.couplings.len() != n || s.couplings.iter().any(|r| r.len() != n) {
            return Err(invalid(
                "spin_system.couplings",
                format!("must be a {n}×{n} matrix"),
            ));
        }
        let flat: Vec<f64> = s.couplings.iter().flatten().copied().collect();
        let couplings = ndarray::Array2::from_shape_vec((n, n), flat)
            .map_err(|e| invalid("spin_system.couplings", e))?;
        SpinSystem::new(s.frequencies.clone(), couplings, s.t1.clone(), s.t2.clone())
            .map_err(|e| invalid("spin_system", e))
    }

    pub fn distribution(&self) -> Result<RfDistribution, ConfigError> {
        match &self.rf_distribution {
            DistributionConfig::Preset(name) if name == "default" => Ok(default_rf_distribution()),
            DistributionConfig::Preset(name) => Err(invalid(
                "rf_distribution",
                format!("unknown preset {name:?}; use \"default\" or points/weights"),
            )),
            DistributionConfig::Explicit(d) => {
                RfDistribution::new(d.points.clone(), d.weights.clone())
                    .map_err(|e| invalid("rf_distribution", e))
            }
        }
    }

    /// Validated simulation inputs.
    pub fn setup(&self) -> Result<ExperimentSetup, ConfigError> {
        if !(self.iteration_duration.is_finite() && self.iteration_duration > 0.0) {
            return Err(invalid(
                "iteration_duration",
                "must be a positive number of seconds",
            ));
        }
        let sys = self.spin_system()?;
        let dist = self.distribution()?;
        let plan = CircuitPlan::standard();
        let mut noise =
            NoiseModel::new(plan, sys.clone()).map_err(|e| invalid("spin_system", e))?;
        noise.mode = match self.mode {
            Mode::Gate => SimulationMode::GateLevel,
            Mode::Pulse => SimulationMode::PulseLevel,
        };
        noise.pulse = PulseParams {
            iteration_duration: Some(self.iteration_duration),
        };
        if self.mode == Mode::Pulse {
            compile_entangler(&noise.plan, &sys, &noise.pulse)
                .map_err(|e| invalid("iteration_duration", e))?;
        }
        noise.noisy_prep_readout = self.noisy_prep_readout;
        noise.parallel = !self.deterministic;
        if self.relaxation {
            noise = noise
                .with_relaxation(RelaxationRates::additive(&sys), self.iteration_duration)
                .map_err(|e| invalid("iteration_duration", e))?;
        }
        Ok(ExperimentSetup {
            noise,
            dist,
            n_max: self.n_max,
        })
    }

    /// SHA-256 of the canonical TOML rendering of the effective config,
    /// excluding output locations.
    pub fn digest(&self) -> String {
        let canonical = toml::to_string(&Self {
            output: OutputConfig::default(),
            ..self.clone()
        })
        .expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ConfigError::Missing(path.to_path_buf()),
        _ => ConfigError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    ExperimentConfig::parse(&text, path)
}
