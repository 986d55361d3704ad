use entroflow::exchange::{clausius_cycle, CycleReport};

use crate::config::ClausiusConfig;
use crate::Result;

pub const DEFAULT_MAX_CYCLES: usize = 10_000;
pub const DEFAULT_FP_TOL: f64 = 1e-10;

pub fn run(config: &ClausiusConfig, max_cycles: usize, fp_tol: f64) -> Result<CycleReport> {
    let h = config.hamiltonian()?;
    let rho = config.initial(&h)?;
    let strokes = config.strokes()?;
    Ok(clausius_cycle(&h, &rho, &strokes, max_cycles, fp_tol)?)
}
