use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use entroflow::gas::{ensemble_heat, CollisionSpec, GasMode, GasReport};

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Entangled,
    Product,
}

impl From<ModeArg> for GasMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Entangled => GasMode::Entangled,
            ModeArg::Product => GasMode::Product,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasPayload {
    #[serde(flatten)]
    pub report: GasReport,
    /// In the entangled ensemble every event moves energy the same way, so
    /// the mean must carry the sign of `x - 1`.
    pub sign_consistent: bool,
}

pub fn run(spec: &CollisionSpec, mode: ModeArg, samples: usize, seed: u64) -> Result<GasPayload> {
    let report = ensemble_heat(spec, mode.into(), samples, seed)?;
    let sign_consistent = match report.mode {
        GasMode::Entangled if (report.x - 1.0).abs() > 1e-12 => (report.mean_de_a > 0.0) == (report.x > 1.0),
        _ => true,
    };
    Ok(GasPayload { report, sign_consistent })
}
