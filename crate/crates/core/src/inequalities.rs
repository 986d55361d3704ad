//! Checks of strong subadditivity, the average-correlation bound, and the
//! relative-entropy identity for evolutions that start in a Gibbs state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{identity, kron, unitary_deviation, ComplexMatrix, SubsystemDims};
use crate::states::{
    gibbs_state, relative_entropy, subsystem_entropy, von_neumann_entropy, DensityOperator, HamiltonianSpec,
};

/// Inequality slack tolerance (`slack >= -INEQUALITY_TOL` passes).
pub const INEQUALITY_TOL: f64 = 1e-9;

/// Tolerance for the relative-entropy identity.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Outcome of checking `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlackReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub tol: f64,
}

impl SlackReport {
    pub fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        Self { lhs, rhs, slack, pass: slack >= -tol, tol }
    }
}

/// `S^i + S^j <= S^{ik} + S^{jk}` for distinct factors `i, j, k`.
pub fn check_ssa(rho: &DensityOperator, i: usize, j: usize, k: usize) -> Result<SlackReport> {
    let n = rho.dims().num_factors();
    if n < 3 {
        return Err(Error::DimensionMismatch(format!("strong subadditivity needs 3 factors, got {n}")));
    }
    if i >= n || j >= n || k >= n || i == j || j == k || i == k {
        return Err(Error::DimensionMismatch(format!("factors ({i}, {j}, {k}) must be distinct and below {n}")));
    }
    let lhs = subsystem_entropy(rho, &[i])? + subsystem_entropy(rho, &[j])?;
    let rhs = subsystem_entropy(rho, &[i, k])? + subsystem_entropy(rho, &[j, k])?;
    Ok(SlackReport::new(lhs, rhs, INEQUALITY_TOL))
}

/// Pairwise mutual information averaged over the `N(N-1)/2` pairs against the
/// average single-system entropy.
pub fn average_correlation_bound(rho: &DensityOperator) -> Result<SlackReport> {
    let n = rho.dims().num_factors();
    if n < 3 {
        return Err(Error::TooFewFactors(n));
    }
    let singles: Vec<f64> = (0..n).map(|i| subsystem_entropy(rho, &[i])).collect::<Result<_>>()?;
    let mut info_sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            info_sum += singles[i] + singles[j] - subsystem_entropy(rho, &[i, j])?;
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let lhs = info_sum / pairs;
    let rhs = singles.iter().sum::<f64>() / n as f64;
    Ok(SlackReport::new(lhs, rhs, INEQUALITY_TOL))
}

/// A trace-preserving channel: couple to an ancilla in a fixed state, apply a
/// joint unitary, discard the ancilla. The system is the left factor.
#[derive(Debug, Clone)]
pub struct Channel {
    pub unitary: ComplexMatrix,
    pub ancilla: DensityOperator,
}

impl Channel {
    /// The identity channel on a `d`-dimensional system.
    pub fn identity(d: usize) -> Self {
        Self { unitary: identity(d), ancilla: DensityOperator::maximally_mixed(SubsystemDims::single(1)) }
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let d_sys = rho.dim();
        let d_anc = self.ancilla.dim();
        if self.unitary.nrows() != d_sys * d_anc || !self.unitary.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} channel unitary for system {d_sys} and ancilla {d_anc}",
                self.unitary.nrows(),
                self.unitary.ncols()
            )));
        }
        let dev = unitary_deviation(&self.unitary);
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
        let joint = kron(rho.matrix(), self.ancilla.matrix());
        let evolved = &self.unitary * joint * self.unitary.adjoint();
        let evolved = (&evolved + evolved.adjoint()) * Complex64::new(0.5, 0.0);
        let dims = SubsystemDims::new(vec![d_sys, d_anc])?;
        DensityOperator::new(evolved, dims)?.reduce(&[0])?.with_dims(rho.dims().clone())
    }
}

/// Both sides of `S(rho_f || rho_i) = beta dU - dS - beta tr(rho_f dH)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eq2Report {
    pub relative_entropy_lhs: f64,
    pub delta_u: f64,
    pub beta_du: f64,
    pub ds: f64,
    pub beta_tr_rhof_dh: f64,
    pub rhs: f64,
    pub identity_gap: f64,
    pub nonneg_slack: f64,
}

impl Eq2Report {
    pub fn identity_holds(&self) -> bool {
        self.identity_gap <= IDENTITY_TOL
    }

    pub fn nonnegative(&self) -> bool {
        self.nonneg_slack >= -1e-10
    }
}

/// Starts from `gibbs(h_i, beta)`, applies `channel`, and evaluates both
/// sides of the relative-entropy identity against the final Hamiltonian
/// `h_f`. With `h_f == h_i` the right side is the heat form `beta Q - dS`.
pub fn gibbs_evolution_identity(
    h_i: &HamiltonianSpec,
    beta: f64,
    channel: &Channel,
    h_f: &HamiltonianSpec,
) -> Result<Eq2Report> {
    let rho_i = gibbs_state(h_i, beta)?;
    if h_f.dim() != h_i.dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial Hamiltonian has {} levels, final has {}",
            h_i.dim(),
            h_f.dim()
        )));
    }
    let rho_f = channel.apply(&rho_i)?;
    let (hi, hf) = (h_i.matrix(), h_f.matrix());

    let lhs = relative_entropy(&rho_f, &rho_i)?;
    let delta_u = rho_f.energy(&hf) - rho_i.energy(&hi);
    let ds = von_neumann_entropy(&rho_f) - von_neumann_entropy(&rho_i);
    let beta_tr_rhof_dh = beta * rho_f.energy(&(&hf - &hi));
    let beta_du = beta * delta_u;
    let rhs = beta_du - ds - beta_tr_rhof_dh;
    Ok(Eq2Report {
        relative_entropy_lhs: lhs,
        delta_u,
        beta_du,
        ds,
        beta_tr_rhof_dh,
        rhs,
        identity_gap: (lhs - rhs).abs(),
        nonneg_slack: rhs,
    })
}
