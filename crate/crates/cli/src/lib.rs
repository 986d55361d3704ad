//! Batch drivers behind the `entroflow` binary. Each subcommand has a runner
//! here that returns a serializable payload, so the same code paths can be
//! exercised in-process.

pub mod clausius;
pub mod config;
pub mod envelope;
pub mod exchange;
pub mod gas;
pub mod ineq;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const VIOLATION: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const DEGENERACY: i32 = 3;
    pub const CONVERGENCE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] entroflow::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("invalid arguments: {0}")]
    Args(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use entroflow::Error as E;
        match self {
            Self::Model(E::NotDegenerate { .. } | E::OverlappingPlanes(_)) => exit::DEGENERACY,
            Self::Model(E::NoConvergence { .. } | E::ConvergenceFailure(_)) => exit::CONVERGENCE,
            _ => exit::VALIDATION,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Rows of a `--sweep name=a:b:n` grid: `n` evenly spaced points from `a` to
/// `b` inclusive.
pub fn parse_sweep(arg: &str, name: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Args(format!("sweep must look like {name}=a:b:n, got {arg:?}"));
    let rest = arg.strip_prefix(name).and_then(|r| r.strip_prefix('=')).ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// Fixed CSV float format: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
