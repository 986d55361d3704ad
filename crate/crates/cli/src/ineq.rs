//! Random-state ensembles for the entropy inequalities.

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use entroflow::inequalities::{average_correlation_bound, check_ssa, gibbs_evolution_identity, Channel};
use entroflow::qmath::{haar_unitary, random_density, Stream, SubsystemDims};
use entroflow::states::{DensityOperator, HamiltonianSpec};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// `S^i + S^j <= S^{ik} + S^{jk}` over every ordered choice of factors.
    Ssa,
    /// Average pairwise mutual information against average entropy.
    Eq1,
    /// Relative-entropy identity for a Gibbs start, a channel and a quench.
    Eq2,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ssa => "ssa",
            Self::Eq1 => "eq1",
            Self::Eq2 => "eq2",
        }
    }
}

/// Ancilla dimension for `eq2` when `--dims` names only the system.
pub const DEFAULT_ANCILLA: usize = 2;

/// Log-uniform range of inverse temperatures for `eq2`.
pub const BETA_RANGE: (f64, f64) = (0.1, 10.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub rank: usize,
    /// Smallest slack of the trial; for `eq2` the right-hand side.
    pub slack: f64,
    /// `eq2` only: `|lhs - rhs|`.
    pub identity_gap: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IneqSummary {
    pub check: Check,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub worst_slack: f64,
    pub worst_trial: u64,
    pub max_identity_gap: Option<f64>,
    pub first_failing_trial: Option<u64>,
}

impl IneqSummary {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

fn random_state(dims: &SubsystemDims, rng: &mut Stream) -> Result<(DensityOperator, usize)> {
    let d = dims.total();
    let rank = rng.integer_in(1, d);
    let m = random_density(d, rank, rng)?;
    Ok((DensityOperator::new(m, dims.clone())?, rank))
}

/// Levels uniform on `[-1, 1]` in a Haar-random eigenbasis.
fn random_hamiltonian(d: usize, rng: &mut Stream) -> Result<HamiltonianSpec> {
    let mut levels: Vec<f64> = (0..d).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    levels.sort_by(f64::total_cmp);
    Ok(HamiltonianSpec::with_basis(levels, haar_unitary(d, rng))?)
}

fn validate(check: Check, dims: &[usize], trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(CliError::Args("--trials must be at least 1".into()));
    }
    if dims.contains(&0) {
        return Err(CliError::Args("every dimension must be at least 1".into()));
    }
    match check {
        Check::Ssa | Check::Eq1 if dims.len() < 3 => {
            Err(CliError::Args(format!("--check {} needs at least 3 factors, got {}", check.name(), dims.len())))
        }
        Check::Eq2 if dims.is_empty() || dims.len() > 2 => {
            Err(CliError::Args("--check eq2 takes --dims system[,ancilla]".into()))
        }
        _ => Ok(()),
    }
}

/// One trial drawn from stream `(seed, trial)`.
pub fn run_trial(check: Check, dims: &[usize], seed: u64, trial: u64) -> Result<TrialOutcome> {
    let mut rng = Stream::new(seed, trial);
    match check {
        Check::Ssa => {
            let sd = SubsystemDims::new(dims.to_vec())?;
            let (rho, rank) = random_state(&sd, &mut rng)?;
            let n = dims.len();
            let mut slack = f64::INFINITY;
            for i in 0..n {
                for j in i + 1..n {
                    for k in (0..n).filter(|&k| k != i && k != j) {
                        slack = slack.min(check_ssa(&rho, i, j, k)?.slack);
                    }
                }
            }
            Ok(TrialOutcome { trial, rank, slack, identity_gap: None, pass: slack >= -entroflow::inequalities::INEQUALITY_TOL })
        }
        Check::Eq1 => {
            let sd = SubsystemDims::new(dims.to_vec())?;
            let (rho, rank) = random_state(&sd, &mut rng)?;
            let r = average_correlation_bound(&rho)?;
            Ok(TrialOutcome { trial, rank, slack: r.slack, identity_gap: None, pass: r.pass })
        }
        Check::Eq2 => {
            let d = dims[0];
            let anc = dims.get(1).copied().unwrap_or(DEFAULT_ANCILLA);
            let h_i = random_hamiltonian(d, &mut rng)?;
            let beta = rng.uniform_in(BETA_RANGE.0.ln(), BETA_RANGE.1.ln()).exp();
            let (ancilla, rank) = random_state(&SubsystemDims::single(anc), &mut rng)?;
            let channel = Channel { unitary: haar_unitary(d * anc, &mut rng), ancilla };
            let h_f = random_hamiltonian(d, &mut rng)?;
            let r = gibbs_evolution_identity(&h_i, beta, &channel, &h_f)?;
            Ok(TrialOutcome {
                trial,
                rank,
                slack: r.nonneg_slack,
                identity_gap: Some(r.identity_gap),
                pass: r.identity_holds() && r.nonnegative(),
            })
        }
    }
}

/// Runs `trials` independent trials in parallel; the summary depends only on
/// `(check, dims, trials, seed)`.
pub fn run(check: Check, dims: &[usize], trials: usize, seed: u64) -> Result<IneqSummary> {
    validate(check, dims, trials)?;
    let outcomes: Vec<TrialOutcome> =
        (0..trials as u64).into_par_iter().map(|t| run_trial(check, dims, seed, t)).collect::<Result<_>>()?;

    let mut worst = outcomes[0];
    for o in &outcomes[1..] {
        if o.slack < worst.slack {
            worst = *o;
        }
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    let max_gap = outcomes.iter().filter_map(|o| o.identity_gap).reduce(f64::max);
    Ok(IneqSummary {
        check,
        dims: dims.to_vec(),
        trials,
        seed,
        passed: trials - failed,
        failed,
        worst_slack: worst.slack,
        worst_trial: worst.trial,
        max_identity_gap: max_gap,
        first_failing_trial: outcomes.iter().find(|o| !o.pass).map(|o| o.trial),
    })
}
