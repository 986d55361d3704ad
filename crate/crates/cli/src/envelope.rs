use serde::{Deserialize, Serialize};

/// Wrapper around every JSON result. Only `wall_time_s` varies between runs
/// of the same command; `payload` is reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope<T> {
    pub tool_version: String,
    pub command: String,
    /// The exact configuration used, flags and file contents merged.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
    pub payload: T,
}

impl<T> ResultEnvelope<T> {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>, wall_time_s: f64, payload: T) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            seed,
            wall_time_s,
            payload,
        }
    }
}
