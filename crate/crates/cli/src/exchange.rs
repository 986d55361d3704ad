//! Two-system exchange runs from a JSON config.

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use entroflow::exchange::{givens_unitary, run_exchange, CaseSpec, ExchangeReport};
use entroflow::states::gibbs_state;

use crate::config::ExchangeConfig;
use crate::{fmt_f64, Result};

/// Joint levels closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

pub const SWEEP_HEADER: [&str; 8] = ["phi", "q_a", "q_b", "ds_a", "ds_b", "i_init", "i_final", "w"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CaseArg {
    /// Uncorrelated product of Gibbs states.
    S,
    /// Entangled pure state with Gibbs marginals.
    V,
}

pub fn case_spec(config: &ExchangeConfig, case: CaseArg) -> Result<CaseSpec> {
    let spec = config.spec();
    spec.validate()?;
    Ok(match case {
        CaseArg::V => CaseSpec::Entangled(spec),
        CaseArg::S => {
            let beta_a = config.beta_a.unwrap_or(spec.beta_a());
            let beta_b = config.beta_b.unwrap_or(spec.beta_b());
            let (h_a, h_b) = (spec.hamiltonian_a()?, spec.hamiltonian_b()?);
            // surface bad overrides as validation errors before the run
            gibbs_state(&h_a, beta_a)?;
            gibbs_state(&h_b, beta_b)?;
            CaseSpec::Uncorrelated { h_a, beta_a, h_b, beta_b }
        }
    })
}

/// A single exchange with every rotation angle optionally overridden.
pub fn run_single(config: &ExchangeConfig, case: CaseArg, phi: Option<f64>) -> Result<ExchangeReport> {
    let case = case_spec(config, case)?;
    let (h_a, h_b) = case.hamiltonians()?;
    let u = givens_unitary(&h_a, &h_b, &config.rotations(phi), DEGENERACY_TOL)?;
    Ok(run_exchange(&case, &u)?)
}

/// One report per angle, in input order.
pub fn run_sweep(config: &ExchangeConfig, case: CaseArg, phis: &[f64]) -> Result<Vec<ExchangeReport>> {
    phis.par_iter().map(|&phi| run_single(config, case, Some(phi))).collect()
}

pub fn sweep_csv(phis: &[f64], reports: &[ExchangeReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| crate::CliError::Io(std::io::Error::other(e));
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for (phi, r) in phis.iter().zip(reports) {
        let row = [
            *phi,
            r.q_a,
            r.q_b,
            r.ds_a,
            r.ds_b,
            r.mutual_info_initial,
            r.mutual_info_final,
            r.work_leak,
        ];
        w.write_record(row.iter().map(|x| fmt_f64(*x))).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}
