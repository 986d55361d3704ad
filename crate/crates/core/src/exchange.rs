//! Heat exchange between two systems that start either uncorrelated (product
//! of Gibbs states) or entangled in a pure state with Gibbs marginals, and a
//! runner for cyclic processes driven by reservoir contacts.
//!
//! Couplings are exactly energy conserving: Givens rotations between
//! degenerate joint levels of `H_A ⊗ I + I ⊗ H_B`, or partial swaps between
//! identical systems. Heat is then the only exchanged energy, `Q_A + Q_B = 0`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{
    commutator, haar_unitary, identity, kron, max_abs, trace_distance, unitary_deviation, ComplexMatrix,
    Stream, SubsystemDims,
};
use crate::states::{
    entangled_thermal_state, gibbs_state, mutual_information, subsystem_entropy, von_neumann_entropy,
    DensityOperator, EntangledThermalSpec, HamiltonianSpec,
};

/// Bound on `|Q_A + Q_B|` below which the exchange counts as work-free and
/// the heat-flow contracts are asserted.
pub const WORK_LEAK_TOL: f64 = 1e-10;

/// Bound on `max |[U, H_A ⊗ I + I ⊗ H_B]|` for an energy-conserving unitary.
pub const COMMUTATOR_TOL: f64 = 1e-10;

pub const CONTRACT_TOL: f64 = 1e-9;

/// Tolerance for the cycle sum `sum_j beta_j Q_j <= 0`.
pub const CLAUSIUS_SUM_TOL: f64 = 1e-8;

/// A joint basis label `(i, j)`: level `i` of A, level `j` of B.
pub type JointLevel = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    /// Uncorrelated initial state.
    S,
    /// Entangled pure initial state.
    V,
}

#[derive(Debug, Clone)]
pub enum CaseSpec {
    Uncorrelated { h_a: HamiltonianSpec, beta_a: f64, h_b: HamiltonianSpec, beta_b: f64 },
    Entangled(EntangledThermalSpec),
}

impl CaseSpec {
    /// The product of the two Gibbs marginals of an entangled spec, at the
    /// same local Hamiltonians and temperatures.
    pub fn decorrelated(spec: &EntangledThermalSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self::Uncorrelated {
            h_a: spec.hamiltonian_a()?,
            beta_a: spec.beta_a(),
            h_b: spec.hamiltonian_b()?,
            beta_b: spec.beta_b(),
        })
    }

    pub fn kind(&self) -> CaseKind {
        match self {
            Self::Uncorrelated { .. } => CaseKind::S,
            Self::Entangled(_) => CaseKind::V,
        }
    }

    pub fn hamiltonians(&self) -> Result<(HamiltonianSpec, HamiltonianSpec)> {
        match self {
            Self::Uncorrelated { h_a, h_b, .. } => Ok((h_a.clone(), h_b.clone())),
            Self::Entangled(spec) => Ok((spec.hamiltonian_a()?, spec.hamiltonian_b()?)),
        }
    }

    pub fn betas(&self) -> (f64, f64) {
        match self {
            Self::Uncorrelated { beta_a, beta_b, .. } => (*beta_a, *beta_b),
            Self::Entangled(spec) => (spec.beta_a(), spec.beta_b()),
        }
    }

    pub fn initial_state(&self) -> Result<DensityOperator> {
        match self {
            Self::Uncorrelated { h_a, beta_a, h_b, beta_b } => {
                if h_a.dim() < 2 || h_b.dim() < 2 {
                    return Err(Error::InvalidSpec("exchange needs at least 2 levels per system".into()));
                }
                gibbs_state(h_a, *beta_a)?.tensor(&gibbs_state(h_b, *beta_b)?)
            }
            Self::Entangled(spec) => entangled_thermal_state(spec)?.density(),
        }
    }
}

/// `H_A ⊗ I + I ⊗ H_B`.
pub fn total_hamiltonian(h_a: &HamiltonianSpec, h_b: &HamiltonianSpec) -> ComplexMatrix {
    kron(&h_a.matrix(), &identity(h_b.dim())) + kron(&identity(h_a.dim()), &h_b.matrix())
}

fn joint_energy(h_a: &HamiltonianSpec, h_b: &HamiltonianSpec, (i, j): JointLevel) -> f64 {
    h_a.levels()[i] + h_b.levels()[j]
}

/// Every unordered pair of distinct joint levels whose total energies agree
/// within `tol`, listed in joint-index order.
pub fn degenerate_pairs(h_a: &HamiltonianSpec, h_b: &HamiltonianSpec, tol: f64) -> Vec<(JointLevel, JointLevel)> {
    let (da, db) = (h_a.dim(), h_b.dim());
    let labels: Vec<JointLevel> = (0..da).flat_map(|i| (0..db).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for (n, &u) in labels.iter().enumerate() {
        for &v in &labels[n + 1..] {
            if (joint_energy(h_a, h_b, u) - joint_energy(h_a, h_b, v)).abs() <= tol {
                out.push((u, v));
            }
        }
    }
    out
}

/// A rotation by `phi` in the plane spanned by joint levels `u` and `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub u: JointLevel,
    pub v: JointLevel,
    pub phi: f64,
}

/// Product of Givens rotations between degenerate joint levels, expressed in
/// the computational basis. At `phi = pi/2` a rotation maps `|u>` to `|v>`
/// and `|v>` to `-|u>`.
pub fn givens_unitary(
    h_a: &HamiltonianSpec,
    h_b: &HamiltonianSpec,
    rotations: &[Rotation],
    tol: f64,
) -> Result<ComplexMatrix> {
    let (da, db) = (h_a.dim(), h_b.dim());
    let mut g = identity(da * db);
    let mut used = vec![false; da * db];
    for r in rotations {
        for (i, j) in [r.u, r.v] {
            if i >= da || j >= db {
                return Err(Error::DimensionMismatch(format!("joint level ({i}, {j}) outside {da}x{db}")));
            }
        }
        let (a, b) = (r.u.0 * db + r.u.1, r.v.0 * db + r.v.1);
        if a == b {
            return Err(Error::OverlappingPlanes(a));
        }
        let gap = joint_energy(h_a, h_b, r.u) - joint_energy(h_a, h_b, r.v);
        if gap.is_nan() || gap.abs() > tol {
            return Err(Error::NotDegenerate { u: r.u, v: r.v, gap });
        }
        for idx in [a, b] {
            if used[idx] {
                return Err(Error::OverlappingPlanes(idx));
            }
            used[idx] = true;
        }
        let (s, c) = r.phi.sin_cos();
        g[(a, a)] = Complex64::new(c, 0.0);
        g[(b, b)] = Complex64::new(c, 0.0);
        g[(a, b)] = Complex64::new(-s, 0.0);
        g[(b, a)] = Complex64::new(s, 0.0);
    }
    let w = kron(&h_a.eigenbasis(), &h_b.eigenbasis());
    Ok(&w * g * w.adjoint())
}

/// `cos(phi) I - i sin(phi) SWAP` on `d ⊗ d`.
pub fn partial_swap(d: usize, phi: f64) -> ComplexMatrix {
    let (s, c) = phi.sin_cos();
    let mut u = identity(d * d) * Complex64::new(c, 0.0);
    for i in 0..d {
        for j in 0..d {
            u[(j * d + i, i * d + j)] += Complex64::new(0.0, -s);
        }
    }
    u
}

/// Haar-random unitary inside every degenerate eigenspace of
/// `H_A ⊗ I + I ⊗ H_B` (levels within `tol` are grouped), identity coupling
/// between eigenspaces.
pub fn random_energy_conserving_unitary(
    h_a: &HamiltonianSpec,
    h_b: &HamiltonianSpec,
    tol: f64,
    rng: &mut Stream,
) -> ComplexMatrix {
    let (da, db) = (h_a.dim(), h_b.dim());
    let mut order: Vec<usize> = (0..da * db).collect();
    let energy = |k: usize| joint_energy(h_a, h_b, (k / db, k % db));
    order.sort_by(|&x, &y| energy(x).total_cmp(&energy(y)).then(x.cmp(&y)));

    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for k in order {
        match blocks.last_mut() {
            Some(b) if energy(k) - energy(b[0]) <= tol => b.push(k),
            _ => blocks.push(vec![k]),
        }
    }
    let mut g = ComplexMatrix::zeros(da * db, da * db);
    for block in &blocks {
        let local = haar_unitary(block.len(), rng);
        for (r, &x) in block.iter().enumerate() {
            for (c, &y) in block.iter().enumerate() {
                g[(x, y)] = local[(r, c)];
            }
        }
    }
    let w = kron(&h_a.eigenbasis(), &h_b.eigenbasis());
    &w * g * w.adjoint()
}

/// A named heat-flow contract and whether it holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractCheck {
    pub name: String,
    pub value: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeReport {
    pub case: CaseKind,
    pub beta_a: f64,
    pub beta_b: f64,
    pub q_a: f64,
    pub q_b: f64,
    pub ds_a: f64,
    pub ds_b: f64,
    pub mutual_info_initial: f64,
    pub mutual_info_final: f64,
    pub joint_entropy_initial: f64,
    pub joint_entropy_final: f64,
    /// `Q_A + Q_B`.
    pub work_leak: f64,
    pub commutator_norm: f64,
    pub energy_conserving: bool,
    /// `beta_A Q_A - dS_A`, nonnegative for a Gibbs initial marginal.
    pub slack_a: f64,
    pub slack_b: f64,
    pub contracts: Vec<ContractCheck>,
    /// Contracts are only binding when `|work_leak| <= WORK_LEAK_TOL`.
    pub contracts_asserted: bool,
}

impl ExchangeReport {
    /// Names of binding contracts that fail.
    pub fn violations(&self) -> Vec<&str> {
        if !self.contracts_asserted {
            return Vec::new();
        }
        self.contracts.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }
}

fn at_least(name: &str, value: f64, bound: f64) -> ContractCheck {
    ContractCheck { name: name.to_string(), value, holds: value >= bound }
}

fn at_most(name: &str, value: f64, bound: f64) -> ContractCheck {
    ContractCheck { name: name.to_string(), value, holds: value <= bound }
}

/// Applies `u` to the initial state of `case` and reports heats, local
/// entropy changes and correlations.
pub fn run_exchange(case: &CaseSpec, u: &ComplexMatrix) -> Result<ExchangeReport> {
    let (h_a, h_b) = case.hamiltonians()?;
    let (beta_a, beta_b) = case.betas();
    let rho = case.initial_state()?;
    let d = h_a.dim() * h_b.dim();
    if u.nrows() != d || !u.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} unitary on a {d}-dimensional pair", u.nrows(), u.ncols())));
    }
    let dev = unitary_deviation(u);
    if dev > 1e-10 {
        return Err(Error::NotUnitary(dev));
    }
    let h_total = total_hamiltonian(&h_a, &h_b);
    let commutator_norm = max_abs(&commutator(u, &h_total));

    let rho_f = rho.evolve(u)?;
    let (ma_i, mb_i) = (rho.reduce(&[0])?, rho.reduce(&[1])?);
    let (ma_f, mb_f) = (rho_f.reduce(&[0])?, rho_f.reduce(&[1])?);
    let (ha, hb) = (h_a.matrix(), h_b.matrix());
    let q_a = ma_f.energy(&ha) - ma_i.energy(&ha);
    let q_b = mb_f.energy(&hb) - mb_i.energy(&hb);
    let ds_a = von_neumann_entropy(&ma_f) - von_neumann_entropy(&ma_i);
    let ds_b = von_neumann_entropy(&mb_f) - von_neumann_entropy(&mb_i);
    let work_leak = q_a + q_b;

    let contracts = match case.kind() {
        CaseKind::S => vec![
            at_least("entropy_sum_nondecreasing", ds_a + ds_b, -CONTRACT_TOL),
            at_least("weighted_heat_nonnegative", beta_a * q_a + beta_b * q_b, -CONTRACT_TOL),
            at_least("heat_flows_hot_to_cold", (beta_a - beta_b) * q_a, -CONTRACT_TOL),
        ],
        CaseKind::V => vec![
            at_most("entropy_changes_equal", (ds_a - ds_b).abs(), CONTRACT_TOL),
            at_most("entropy_nonincreasing", ds_a, CONTRACT_TOL),
        ],
    };

    Ok(ExchangeReport {
        case: case.kind(),
        beta_a,
        beta_b,
        q_a,
        q_b,
        ds_a,
        ds_b,
        mutual_info_initial: mutual_information(&rho, 0, 1)?,
        mutual_info_final: mutual_information(&rho_f, 0, 1)?,
        joint_entropy_initial: von_neumann_entropy(&rho),
        joint_entropy_final: von_neumann_entropy(&rho_f),
        work_leak,
        commutator_norm,
        energy_conserving: commutator_norm <= COMMUTATOR_TOL,
        slack_a: beta_a * q_a - ds_a,
        slack_b: beta_b * q_b - ds_b,
        contracts,
        contracts_asserted: work_leak.abs() <= WORK_LEAK_TOL,
    })
}

/// One step of a cyclic process.
#[derive(Debug, Clone)]
pub enum ClausiusStroke {
    /// Contact with a fresh reservoir: a copy of the current system
    /// Hamiltonian in its Gibbs state at `temperature`, coupled by a partial
    /// swap of angle `phi`.
    Contact { temperature: f64, phi: f64 },
    /// Instantaneous Hamiltonian replacement; the state is unchanged and the
    /// energy difference is work.
    Quench(HamiltonianSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactRecord {
    pub stroke: usize,
    pub temperature: f64,
    pub beta: f64,
    /// Heat absorbed by the system.
    pub heat: f64,
    pub reservoir_heat: f64,
    pub entropy_change: f64,
    /// `beta Q + dS`.
    pub beta_heat_plus_entropy: f64,
    /// `dS - beta Q`: nonnegative because the reservoir starts in a Gibbs
    /// state uncorrelated with the system.
    pub entropy_minus_beta_heat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchRecord {
    pub stroke: usize,
    /// `tr(rho (H_new - H_old))`, energy given to the system.
    pub work: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    /// `sum_j beta_j Q_j` over the converged cycle.
    pub clausius_sum: f64,
    pub contacts: Vec<ContactRecord>,
    pub quenches: Vec<QuenchRecord>,
    pub cycles_to_convergence: usize,
    pub fixed_point_residual: f64,
    pub total_work: f64,
}

impl CycleReport {
    pub fn clausius_holds(&self) -> bool {
        self.clausius_sum <= CLAUSIUS_SUM_TOL
    }
}

fn same_hamiltonian(a: &HamiltonianSpec, b: &HamiltonianSpec) -> bool {
    a.dim() == b.dim()
        && a.levels().iter().zip(b.levels()).all(|(x, y)| (x - y).abs() <= 1e-12)
        && max_abs(&(a.eigenbasis() - b.eigenbasis())) <= 1e-12
}

fn validate_cycle(h0: &HamiltonianSpec, strokes: &[ClausiusStroke]) -> Result<()> {
    let mut current = h0;
    for (n, stroke) in strokes.iter().enumerate() {
        match stroke {
            ClausiusStroke::Contact { temperature, phi } => {
                if !(*temperature > 0.0 && temperature.is_finite()) || !phi.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "stroke {n}: reservoir temperature must be positive, got {temperature}"
                    )));
                }
            }
            ClausiusStroke::Quench(h) => {
                if h.dim() != h0.dim() {
                    return Err(Error::DimensionMismatch(format!(
                        "stroke {n}: quench to {} levels on a {}-level system",
                        h.dim(),
                        h0.dim()
                    )));
                }
                current = h;
            }
        }
    }
    if !same_hamiltonian(current, h0) {
        return Err(Error::BadCycle(format!(
            "final Hamiltonian {:?} differs from initial {:?}",
            current.levels(),
            h0.levels()
        )));
    }
    Ok(())
}

struct CyclePass {
    end: DensityOperator,
    contacts: Vec<ContactRecord>,
    quenches: Vec<QuenchRecord>,
}

fn run_one_cycle(h0: &HamiltonianSpec, start: &DensityOperator, strokes: &[ClausiusStroke]) -> Result<CyclePass> {
    let d = h0.dim();
    let mut h = h0.clone();
    let mut rho = start.clone();
    let mut contacts = Vec::new();
    let mut quenches = Vec::new();
    for (n, stroke) in strokes.iter().enumerate() {
        match stroke {
            ClausiusStroke::Contact { temperature, phi } => {
                let beta = 1.0 / temperature;
                let hm = h.matrix();
                let reservoir = gibbs_state(&h, beta)?;
                let joint = rho.tensor(&reservoir)?;
                let after = joint.evolve(&partial_swap(d, *phi))?;
                let sys = after.reduce(&[0])?;
                let res = after.reduce(&[1])?;
                let heat = sys.energy(&hm) - rho.energy(&hm);
                let reservoir_heat = res.energy(&hm) - reservoir.energy(&hm);
                let entropy_change = von_neumann_entropy(&sys) - von_neumann_entropy(&rho);
                contacts.push(ContactRecord {
                    stroke: n,
                    temperature: *temperature,
                    beta,
                    heat,
                    reservoir_heat,
                    entropy_change,
                    beta_heat_plus_entropy: beta * heat + entropy_change,
                    entropy_minus_beta_heat: entropy_change - beta * heat,
                });
                rho = sys.with_dims(SubsystemDims::single(d))?;
            }
            ClausiusStroke::Quench(next) => {
                let work = rho.energy(&(next.matrix() - h.matrix()));
                quenches.push(QuenchRecord { stroke: n, work });
                h = next.clone();
            }
        }
    }
    Ok(CyclePass { end: rho, contacts, quenches })
}

/// Repeats the stroke sequence until the state at the end of a cycle is
/// within trace distance `fp_tol` of the state at its start, then reports
/// that cycle.
pub fn clausius_cycle(
    h0: &HamiltonianSpec,
    initial: &DensityOperator,
    strokes: &[ClausiusStroke],
    max_cycles: usize,
    fp_tol: f64,
) -> Result<CycleReport> {
    if initial.dim() != h0.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional state for a {}-level Hamiltonian",
            initial.dim(),
            h0.dim()
        )));
    }
    validate_cycle(h0, strokes)?;
    let mut state = initial.clone().with_dims(SubsystemDims::single(h0.dim()))?;
    let mut residual = f64::INFINITY;
    for cycle in 1..=max_cycles {
        let pass = run_one_cycle(h0, &state, strokes)?;
        residual = trace_distance(state.matrix(), pass.end.matrix())?;
        if residual < fp_tol {
            let clausius_sum = pass.contacts.iter().map(|c| c.beta * c.heat).sum();
            let total_work = pass.quenches.iter().map(|q| q.work).sum();
            return Ok(CycleReport {
                clausius_sum,
                contacts: pass.contacts,
                quenches: pass.quenches,
                cycles_to_convergence: cycle,
                fixed_point_residual: residual,
                total_work,
            });
        }
        state = pass.end;
    }
    Err(Error::NoConvergence { cycles: max_cycles, residual })
}

/// The two-reservoir qubit cycle: hot contact at gap 1, quench to gap 2,
/// cold contact at gap 2, quench back to gap 1.
pub fn two_reservoir_qubit_cycle(t_hot: f64, t_cold: f64, phi: f64) -> Result<(HamiltonianSpec, Vec<ClausiusStroke>)> {
    let h1 = HamiltonianSpec::new(vec![0.0, 1.0])?;
    let h2 = HamiltonianSpec::new(vec![0.0, 2.0])?;
    let strokes = vec![
        ClausiusStroke::Contact { temperature: t_hot, phi },
        ClausiusStroke::Quench(h2),
        ClausiusStroke::Contact { temperature: t_cold, phi },
        ClausiusStroke::Quench(h1.clone()),
    ];
    Ok((h1, strokes))
}

/// Full-swap contact angle.
pub const FULL_SWAP: f64 = FRAC_PI_2;

/// Random spec whose two ladders are commensurate, so the joint spectrum has
/// degenerate levels for energy-conserving couplings to act on. Levels are
/// distinct integers starting at 0, `mu_B / mu_A` is one of `1, 2, 1/2, 1/3`.
pub fn random_commensurate_spec(max_dim: usize, rng: &mut Stream) -> EntangledThermalSpec {
    let d = rng.integer_in(2, max_dim.max(2));
    let mut epsilon = vec![0.0];
    while epsilon.len() < d {
        let step = rng.integer_in(1, 2) as f64;
        epsilon.push(epsilon.last().unwrap() + step);
    }
    let mu_a = rng.uniform_in(0.5, 2.0);
    let ratio = [1.0, 2.0, 0.5, 1.0 / 3.0][rng.integer_in(0, 3)];
    EntangledThermalSpec { epsilon, gamma: rng.uniform_in(0.3, 2.0), mu_a, mu_b: mu_a * ratio }
}

/// Entropy of each factor of a bipartite state, for callers that only hold
/// the joint state.
pub fn local_entropies(rho: &DensityOperator) -> Result<(f64, f64)> {
    Ok((subsystem_entropy(rho, &[0])?, subsystem_entropy(rho, &[1])?))
}
