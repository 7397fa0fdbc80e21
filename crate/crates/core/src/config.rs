//! TOML configuration for `analyze` and `simulate`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cox::Ties;
use crate::error::{Error, Result};
use crate::rmtif::{BootstrapConfig, CiMethod, MIN_REPLICATES};
use crate::simulate::{TrialScenario, MIN_MONTE_CARLO};

fn default_alpha() -> f64 {
    0.05
}

fn default_bootstrap() -> BootstrapConfig {
    BootstrapConfig {
        replicates: 1000,
        seed: 1,
        ci: CiMethod::Normal,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointSubset {
    pub name: String,
    pub keep: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    pub output_dir: PathBuf,
    pub tau: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Expected transition labels in severity order; checked against the input.
    #[serde(default)]
    pub endpoints: Option<Vec<String>>,
    /// One score per transition of the full endpoint list (default `1..=K+1`).
    #[serde(default)]
    pub scores: Option<Vec<f64>>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: BootstrapConfig,
    #[serde(default)]
    pub ties: Ties,
    /// Endpoint subsets to analyze; empty means all endpoints only.
    #[serde(default)]
    pub sensitivity: Vec<EndpointSubset>,
}

impl AnalysisConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads the file and resolves a relative `input` against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        if cfg.input.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.input = dir.join(&cfg.input);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::NonPositiveHorizon(self.tau));
        }
        crate::inference::check_alpha(self.alpha)?;
        if self.bootstrap.replicates < MIN_REPLICATES {
            return Err(Error::TooFewReplicates {
                min: MIN_REPLICATES,
                got: self.bootstrap.replicates,
            });
        }
        if let (Some(e), Some(s)) = (&self.endpoints, &self.scores) {
            if e.len() != s.len() {
                return Err(Error::Config(format!("{} scores for {} endpoints", s.len(), e.len())));
            }
        }
        for subset in &self.sensitivity {
            if subset.keep.is_empty() {
                return Err(Error::Config(format!("subset {:?} keeps no endpoints", subset.name)));
            }
            if let Some(e) = &self.endpoints {
                if subset.keep.last() != e.last() {
                    return Err(Error::Config(format!(
                        "subset {:?} must end with the death endpoint {:?}",
                        subset.name,
                        e.last().unwrap()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub output_dir: PathBuf,
    /// Horizon used for the truth table.
    pub tau: f64,
    #[serde(default = "default_n_mc")]
    pub n_mc: usize,
    pub scenario: TrialScenario,
}

fn default_n_mc() -> usize {
    MIN_MONTE_CARLO
}

impl SimulationConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}
