//! JSON configuration files. Every file carries `"schema_version": 1` and a
//! `"kind"` discriminator naming the subcommand it configures.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use entroflow::exchange::{ClausiusStroke, Rotation};
use entroflow::qmath::{real_diag, SubsystemDims};
use entroflow::states::{gibbs_state, DensityOperator, EntangledThermalSpec, HamiltonianSpec};

use crate::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// `[[i, j], [i', j'], phi]`.
pub type RotationTriple = ((usize, usize), (usize, usize), f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExchangeConfig {
    pub schema_version: u32,
    pub kind: String,
    pub epsilon: Vec<f64>,
    pub gamma: f64,
    pub mu_a: f64,
    pub mu_b: f64,
    pub rotations: Vec<RotationTriple>,
    /// Inverse temperatures for the uncorrelated case. Default `mu gamma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_b: Option<f64>,
}

impl ExchangeConfig {
    pub fn spec(&self) -> EntangledThermalSpec {
        EntangledThermalSpec { epsilon: self.epsilon.clone(), gamma: self.gamma, mu_a: self.mu_a, mu_b: self.mu_b }
    }

    /// Rotations with every angle replaced by `phi` when given.
    pub fn rotations(&self, phi: Option<f64>) -> Vec<Rotation> {
        self.rotations.iter().map(|&(u, v, p)| Rotation { u, v, phi: phi.unwrap_or(p) }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Gibbs { temperature: f64 },
    /// Populations in the energy basis.
    Diagonal(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StrokeConfig {
    Contact { temperature: f64, phi: f64 },
    Quench { levels: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClausiusConfig {
    pub schema_version: u32,
    pub kind: String,
    pub levels: Vec<f64>,
    pub initial_state: InitialState,
    pub strokes: Vec<StrokeConfig>,
}

impl ClausiusConfig {
    pub fn hamiltonian(&self) -> Result<HamiltonianSpec> {
        Ok(HamiltonianSpec::new(self.levels.clone())?)
    }

    pub fn initial(&self, h: &HamiltonianSpec) -> Result<DensityOperator> {
        match &self.initial_state {
            InitialState::Gibbs { temperature } => {
                if temperature.is_nan() || *temperature <= 0.0 {
                    return Err(CliError::Config(format!("initial temperature must be positive, got {temperature}")));
                }
                Ok(gibbs_state(h, 1.0 / temperature)?)
            }
            InitialState::Diagonal(p) => {
                if p.len() != h.dim() {
                    return Err(CliError::Config(format!("{} populations for {} levels", p.len(), h.dim())));
                }
                Ok(DensityOperator::new(real_diag(p), SubsystemDims::single(h.dim()))?)
            }
        }
    }

    pub fn strokes(&self) -> Result<Vec<ClausiusStroke>> {
        self.strokes
            .iter()
            .map(|s| match s {
                StrokeConfig::Contact { temperature, phi } => {
                    Ok(ClausiusStroke::Contact { temperature: *temperature, phi: *phi })
                }
                StrokeConfig::Quench { levels } => Ok(ClausiusStroke::Quench(HamiltonianSpec::new(levels.clone())?)),
            })
            .collect()
    }
}

/// Parses `text` after checking the version and kind fields.
pub fn parse<T: DeserializeOwned>(text: &str, kind: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        other => return Err(CliError::Config(format!("schema_version must be {SCHEMA_VERSION}, got {other:?}"))),
    }
    match value.get("kind").and_then(|v| v.as_str()) {
        Some(k) if k == kind => {}
        other => return Err(CliError::Config(format!("kind must be {kind:?}, got {other:?}"))),
    }
    serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
}

pub fn load<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, kind)
}
