//! Density operators, Gibbs states, entropic functionals and the entangled
//! thermal pair.
//!
//! Units: `hbar = k_B = 1`, entropies in nats.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{
    self, eig_hermitian, expectation, hermitian_deviation, identity, partial_trace, real_diag, trace,
    unitary_deviation, ComplexMatrix, Eigen, SubsystemDims,
};

/// Validation tolerance for Hermiticity, positivity and unit trace.
pub const STATE_TOL: f64 = 1e-10;

/// Eigenvalues below this are treated as zero inside logarithms.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// A validated density operator together with its spectral decomposition.
///
/// The spectrum is computed once at construction. States built from a known
/// spectral form (Gibbs states, unitary evolutions of them) carry that form
/// exactly instead of re-diagonalizing, which keeps `ln rho` accurate for
/// exponentially small populations.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: SubsystemDims,
    spectrum: Eigen,
    exact_spectrum: bool,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, dims: SubsystemDims) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for subsystem dims {:?}",
                matrix.nrows(),
                matrix.ncols(),
                dims.as_slice()
            )));
        }
        let herm = hermitian_deviation(&matrix);
        if herm.is_nan() || herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = trace(&matrix);
        if !((tr.re - 1.0).abs() <= STATE_TOL && tr.im.abs() <= STATE_TOL) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let spectrum = eig_hermitian(&matrix)?;
        let min = spectrum.values.first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix, dims, spectrum, exact_spectrum: false })
    }

    /// Builds the state from a trusted spectral form. `values` must be a
    /// probability vector, `vectors` unitary.
    fn from_spectrum(spectrum: Eigen, dims: SubsystemDims) -> Self {
        let matrix = spectrum.reconstruct();
        Self { matrix, dims, spectrum, exact_spectrum: true }
    }

    /// `|psi><psi|` for a unit vector.
    pub fn pure(psi: &DVector<Complex64>, dims: SubsystemDims) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state vector norm {norm} differs from 1")));
        }
        Self::new(psi * psi.adjoint(), dims)
    }

    pub fn maximally_mixed(dims: SubsystemDims) -> Self {
        let d = dims.total();
        let spectrum = Eigen { values: vec![1.0 / d as f64; d], vectors: identity(d) };
        Self::from_spectrum(spectrum, dims)
    }

    /// `self ⊗ other`, with the factor lists concatenated.
    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        Self::new(qmath::kron(&self.matrix, &other.matrix), self.dims.concat(&other.dims))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Ascending eigenvalues and eigenvectors.
    pub fn spectrum(&self) -> &Eigen {
        &self.spectrum
    }

    /// Replaces the factor labels; the joint dimension must agree.
    pub fn with_dims(mut self, dims: SubsystemDims) -> Result<Self> {
        if dims.total() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} do not match joint dimension {}",
                dims.as_slice(),
                self.dim()
            )));
        }
        self.dims = dims;
        Ok(self)
    }

    /// `tr(rho h)`.
    pub fn energy(&self, h: &ComplexMatrix) -> f64 {
        expectation(&self.matrix, h)
    }

    /// `U rho U^dag`. The spectrum is carried along as `(values, U V)`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} unitary on a {}-dimensional state",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        let dev = unitary_deviation(u);
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
        if self.exact_spectrum {
            let spectrum = Eigen { values: self.spectrum.values.clone(), vectors: u * &self.spectrum.vectors };
            return Ok(Self::from_spectrum(spectrum, self.dims.clone()));
        }
        let m = u * &self.matrix * u.adjoint();
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self::new(m, self.dims.clone())
    }

    /// Reduced state on the listed factors (ascending order).
    pub fn reduce(&self, keep: &[usize]) -> Result<Self> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        Self::new(m, self.dims.select(keep))
    }
}

/// Energy levels with an optional eigenbasis (columns); the computational
/// basis is used when none is given.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    levels: Vec<f64>,
    basis: Option<ComplexMatrix>,
}

impl HamiltonianSpec {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidSpec(format!("energy levels must be finite and non-empty: {levels:?}")));
        }
        if levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpec(format!("energy levels must be ascending: {levels:?}")));
        }
        Ok(Self { levels, basis: None })
    }

    pub fn with_basis(levels: Vec<f64>, basis: ComplexMatrix) -> Result<Self> {
        let mut h = Self::new(levels)?;
        if basis.nrows() != h.dim() || !basis.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} basis for {} levels",
                basis.nrows(),
                basis.ncols(),
                h.dim()
            )));
        }
        let dev = unitary_deviation(&basis);
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
        h.basis = Some(basis);
        Ok(h)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn eigenbasis(&self) -> ComplexMatrix {
        self.basis.clone().unwrap_or_else(|| identity(self.dim()))
    }

    pub fn matrix(&self) -> ComplexMatrix {
        match &self.basis {
            None => real_diag(&self.levels),
            Some(v) => Eigen { values: self.levels.clone(), vectors: v.clone() }.reconstruct(),
        }
    }

    /// Same eigenbasis, levels multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::InvalidSpec(format!("scale factor must be non-negative, got {factor}")));
        }
        let levels = self.levels.iter().map(|e| e * factor).collect();
        Ok(Self { levels, basis: self.basis.clone() })
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveBeta(beta))
    }
}

/// `Z = sum_k exp(-beta E_k)`.
pub fn partition_function(h: &HamiltonianSpec, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(h.levels.iter().map(|e| (-beta * e).exp()).sum())
}

/// `ln Z`, evaluated with the ground energy factored out.
pub fn log_partition_function(h: &HamiltonianSpec, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let e0 = h.levels[0];
    let s: f64 = h.levels.iter().map(|e| (-beta * (e - e0)).exp()).sum();
    Ok(-beta * e0 + s.ln())
}

/// Boltzmann populations `exp(-beta E_k) / Z`, in level order.
pub fn gibbs_populations(h: &HamiltonianSpec, beta: f64) -> Result<Vec<f64>> {
    check_beta(beta)?;
    let e0 = h.levels[0];
    let w: Vec<f64> = h.levels.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

/// `exp(-beta H) / Z`.
pub fn gibbs_state(h: &HamiltonianSpec, beta: f64) -> Result<DensityOperator> {
    let values = gibbs_populations(h, beta)?;
    // eigenvalues must be ascending; populations descend with energy
    let n = values.len();
    let basis = h.eigenbasis();
    let order: Vec<usize> = (0..n).rev().collect();
    let spectrum = Eigen {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: ComplexMatrix::from_fn(n, n, |i, j| basis[(i, order[j])]),
    };
    Ok(DensityOperator::from_spectrum(spectrum, SubsystemDims::single(n)))
}

impl DensityOperator {
    /// Eigenvalues at or below this count as zero. Numerically diagonalized
    /// states use [`EIGEN_FLOOR`]; exact spectra are trusted down to zero.
    fn null_floor(&self) -> f64 {
        if self.exact_spectrum {
            0.0
        } else {
            EIGEN_FLOOR
        }
    }

    /// `tr(rho ln rho)`.
    fn neg_entropy(&self) -> f64 {
        let floor = self.null_floor();
        self.spectrum.values.iter().filter(|&&p| p > floor).map(|&p| p * p.ln()).sum()
    }
}

/// `S(rho) = -tr(rho ln rho)` in nats.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    -rho.neg_entropy()
}

/// `S(rho || sigma) = tr(rho ln rho) - tr(rho ln sigma)`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy between dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let neg_entropy = rho.neg_entropy();
    let null_floor = sigma.null_floor();
    let v = &sigma.spectrum.vectors;
    let mut cross = 0.0;
    for (k, &mu) in sigma.spectrum.values.iter().enumerate() {
        let col = v.column(k);
        let weight = (col.adjoint() * rho.matrix() * col)[(0, 0)].re;
        if mu <= null_floor {
            if weight > STATE_TOL {
                return Err(Error::SupportViolation(weight));
            }
            continue;
        }
        cross += weight * mu.ln();
    }
    Ok(neg_entropy - cross)
}

fn check_factor(rho: &DensityOperator, i: usize) -> Result<()> {
    if i >= rho.dims.num_factors() {
        return Err(Error::DimensionMismatch(format!(
            "factor {i} out of range for {} factors",
            rho.dims.num_factors()
        )));
    }
    Ok(())
}

/// Entropy of the reduced state on the listed factors.
pub fn subsystem_entropy(rho: &DensityOperator, factors: &[usize]) -> Result<f64> {
    if factors.len() == rho.dims.num_factors() {
        let mut f = factors.to_vec();
        f.sort_unstable();
        f.dedup();
        if f.len() == factors.len() && f.iter().enumerate().all(|(a, &b)| a == b) {
            return Ok(von_neumann_entropy(rho));
        }
    }
    Ok(von_neumann_entropy(&rho.reduce(factors)?))
}

/// `I^{ij} = S^i + S^j - S^{ij}`.
pub fn mutual_information(rho: &DensityOperator, i: usize, j: usize) -> Result<f64> {
    check_factor(rho, i)?;
    check_factor(rho, j)?;
    if i == j {
        return Err(Error::DimensionMismatch(format!("mutual information needs distinct factors, got {i} twice")));
    }
    Ok(subsystem_entropy(rho, &[i])? + subsystem_entropy(rho, &[j])? - subsystem_entropy(rho, &[i, j])?)
}

/// Reduced state of a single factor.
pub fn marginal(rho: &DensityOperator, which: usize) -> Result<DensityOperator> {
    check_factor(rho, which)?;
    rho.reduce(&[which])
}

/// Parameters of a pure state of two systems whose spectra differ only by a
/// scale factor: `E^A_i = epsilon_i / mu_a`, `E^B_i = epsilon_i / mu_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntangledThermalSpec {
    pub epsilon: Vec<f64>,
    pub gamma: f64,
    pub mu_a: f64,
    pub mu_b: f64,
}

impl EntangledThermalSpec {
    pub fn validate(&self) -> Result<()> {
        let eps = &self.epsilon;
        if eps.len() < 2 || eps.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidSpec(format!("epsilon needs at least 2 finite levels: {eps:?}")));
        }
        if eps[0] != 0.0 {
            return Err(Error::InvalidSpec(format!("epsilon[0] must be 0, got {}", eps[0])));
        }
        if eps.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpec(format!("epsilon must be ascending: {eps:?}")));
        }
        for (name, v) in [("gamma", self.gamma), ("mu_a", self.mu_a), ("mu_b", self.mu_b)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.epsilon.len()
    }

    pub fn hamiltonian_a(&self) -> Result<HamiltonianSpec> {
        HamiltonianSpec::new(self.epsilon.iter().map(|e| e / self.mu_a).collect())
    }

    pub fn hamiltonian_b(&self) -> Result<HamiltonianSpec> {
        HamiltonianSpec::new(self.epsilon.iter().map(|e| e / self.mu_b).collect())
    }

    /// Inverse temperature of marginal A, `mu_a * gamma`.
    pub fn beta_a(&self) -> f64 {
        self.mu_a * self.gamma
    }

    pub fn beta_b(&self) -> f64 {
        self.mu_b * self.gamma
    }
}

/// A pure state of a bipartite system, stored as the full joint vector.
#[derive(Debug, Clone)]
pub struct PureJointState {
    pub amplitudes: DVector<Complex64>,
    pub dims: SubsystemDims,
}

impl PureJointState {
    pub fn density(&self) -> Result<DensityOperator> {
        DensityOperator::pure(&self.amplitudes, self.dims.clone())
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// `Z^{-1/2} sum_i exp(-gamma eps_i / 2) |i;A>|i;B>`.
pub fn entangled_thermal_state(spec: &EntangledThermalSpec) -> Result<PureJointState> {
    spec.validate()?;
    let d = spec.dim();
    let weights: Vec<f64> = spec.epsilon.iter().map(|e| (-spec.gamma * e).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut amplitudes = DVector::from_element(d * d, Complex64::new(0.0, 0.0));
    for (i, w) in weights.iter().enumerate() {
        amplitudes[i * d + i] = Complex64::new((w / z).sqrt(), 0.0);
    }
    Ok(PureJointState { amplitudes, dims: SubsystemDims::new(vec![d, d])? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{max_abs, random_density, Stream};

    fn qubit_levels() -> HamiltonianSpec {
        HamiltonianSpec::new(vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn gibbs_high_temperature_limit() {
        let g = gibbs_state(&qubit_levels(), 1e-12).unwrap();
        assert!(max_abs(&(g.matrix() - identity(2) * Complex64::new(0.5, 0.0))) < 1e-9);
    }

    #[test]
    fn gibbs_qubit_populations() {
        let g = gibbs_state(&qubit_levels(), 1.0).unwrap();
        let p0 = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((g.matrix()[(0, 0)].re - p0).abs() < 1e-14);
        assert!((g.matrix()[(0, 0)].re - 0.7311).abs() < 1e-4);
        assert!((g.matrix()[(1, 1)].re - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn partition_function_ladder() {
        let h = HamiltonianSpec::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let z = partition_function(&h, 1.0).unwrap();
        let oracle: f64 = (0..4).map(|i| (-(i as f64)).exp()).sum();
        assert!((z - oracle).abs() < 1e-14);
        assert!((z - 1.5530).abs() < 1e-4);
        assert!((log_partition_function(&h, 1.0).unwrap() - z.ln()).abs() < 1e-14);
    }

    #[test]
    fn gibbs_rejects_bad_beta() {
        assert_eq!(gibbs_state(&qubit_levels(), 0.0).unwrap_err(), Error::NonpositiveBeta(0.0));
        assert!(gibbs_state(&qubit_levels(), -1.0).is_err());
        assert!(gibbs_state(&qubit_levels(), f64::NAN).is_err());
    }

    #[test]
    fn gibbs_commutes_and_orders_populations() {
        let mut rng = Stream::new(40, 0);
        let basis = qmath::haar_unitary(3, &mut rng);
        let h = HamiltonianSpec::with_basis(vec![-0.5, 0.2, 1.3], basis.clone()).unwrap();
        let g = gibbs_state(&h, 0.7).unwrap();
        assert!(max_abs(&qmath::commutator(g.matrix(), &h.matrix())) < 1e-12);
        let pops: Vec<f64> =
            (0..3).map(|k| (basis.column(k).adjoint() * g.matrix() * basis.column(k))[(0, 0)].re).collect();
        assert!(pops[0] > pops[1] && pops[1] > pops[2]);
        // validate through the general constructor too
        assert!(DensityOperator::new(g.matrix().clone(), SubsystemDims::single(3)).is_ok());
    }

    #[test]
    fn entropy_values() {
        let pure = DensityOperator::new(real_diag(&[1.0, 0.0]), SubsystemDims::single(2)).unwrap();
        assert_eq!(von_neumann_entropy(&pure), 0.0);
        let mixed = DensityOperator::maximally_mixed(SubsystemDims::single(2));
        assert!((von_neumann_entropy(&mixed) - std::f64::consts::LN_2).abs() < 1e-15);
        let g = gibbs_state(&qubit_levels(), 1.0).unwrap();
        let p = 1.0 / (1.0 + (1.0f64).exp());
        let oracle = -(p * p.ln() + (1.0 - p) * (1.0 - p).ln());
        assert!((von_neumann_entropy(&g) - oracle).abs() < 1e-14);
        assert!((von_neumann_entropy(&g) - 0.5822).abs() < 1e-3);
    }

    #[test]
    fn invalid_states_are_rejected() {
        let d2 = || SubsystemDims::single(2);
        assert!(DensityOperator::new(real_diag(&[0.6, 0.6]), d2()).is_err());
        assert!(DensityOperator::new(real_diag(&[1.5, -0.5]), d2()).is_err());
        let mut nh = real_diag(&[0.5, 0.5]);
        nh[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityOperator::new(nh, d2()).is_err());
        assert!(DensityOperator::new(real_diag(&[1.0, 0.0]), SubsystemDims::single(3)).is_err());
    }

    #[test]
    fn relative_entropy_closed_forms() {
        let mut rng = Stream::new(41, 0);
        let rho = DensityOperator::new(random_density(3, 3, &mut rng).unwrap(), SubsystemDims::single(3)).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-10);

        let zero = DensityOperator::new(real_diag(&[1.0, 0.0]), SubsystemDims::single(2)).unwrap();
        let mixed = DensityOperator::maximally_mixed(SubsystemDims::single(2));
        assert!((relative_entropy(&zero, &mixed).unwrap() - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_support_violation() {
        let zero = DensityOperator::new(real_diag(&[1.0, 0.0]), SubsystemDims::single(2)).unwrap();
        let one = DensityOperator::new(real_diag(&[0.0, 1.0]), SubsystemDims::single(2)).unwrap();
        assert!(matches!(relative_entropy(&zero, &one), Err(Error::SupportViolation(_))));
        // rho supported inside sigma's support is fine
        assert!(relative_entropy(&zero, &zero).unwrap().abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_matches_double_sum() {
        let mut rng = Stream::new(42, 0);
        for _ in 0..10 {
            let rho = DensityOperator::new(random_density(4, 4, &mut rng).unwrap(), SubsystemDims::single(4)).unwrap();
            let sigma = DensityOperator::new(random_density(4, 4, &mut rng).unwrap(), SubsystemDims::single(4)).unwrap();
            // sum_ij lambda_i |<a_i|b_j>|^2 (ln lambda_i - ln mu_j)
            let (a, b) = (rho.spectrum(), sigma.spectrum());
            let overlap = a.vectors.adjoint() * &b.vectors;
            let mut oracle = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    oracle += a.values[i] * overlap[(i, j)].norm_sqr() * (a.values[i].ln() - b.values[j].ln());
                }
            }
            assert!((relative_entropy(&rho, &sigma).unwrap() - oracle).abs() < 1e-9);
        }
    }

    #[test]
    fn mutual_information_cases() {
        let mut rng = Stream::new(43, 0);
        let a = DensityOperator::new(random_density(2, 2, &mut rng).unwrap(), SubsystemDims::single(2)).unwrap();
        let b = DensityOperator::new(random_density(3, 3, &mut rng).unwrap(), SubsystemDims::single(3)).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert!(mutual_information(&ab, 0, 1).unwrap().abs() < 1e-10);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DVector::from_vec(vec![h, 0.0, 0.0, h].into_iter().map(|x| Complex64::new(x, 0.0)).collect());
        let bell = DensityOperator::pure(&bell, SubsystemDims::new(vec![2, 2]).unwrap()).unwrap();
        assert!((mutual_information(&bell, 0, 1).unwrap() - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!(mutual_information(&bell, 0, 0).is_err());
        assert!(mutual_information(&bell, 0, 2).is_err());
    }

    #[test]
    fn ghz_pair_information() {
        let mut v = vec![Complex64::new(0.0, 0.0); 8];
        v[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[7] = v[0];
        let ghz = DensityOperator::pure(&DVector::from_vec(v), SubsystemDims::new(vec![2, 2, 2]).unwrap()).unwrap();
        // every two-qubit marginal is diag(1/2, 0, 0, 1/2)
        let oracle_pair = DensityOperator::new(real_diag(&[0.5, 0.0, 0.0, 0.5]), SubsystemDims::new(vec![2, 2]).unwrap()).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let pair = ghz.reduce(&[i, j]).unwrap();
            assert!(max_abs(&(pair.matrix() - oracle_pair.matrix())) < 1e-15);
            assert!((mutual_information(&ghz, i, j).unwrap() - std::f64::consts::LN_2).abs() < 1e-9);
        }
    }

    #[test]
    fn entangled_state_limits_and_amplitudes() {
        let spec = EntangledThermalSpec { epsilon: vec![0.0, 1.0], gamma: 1e-12, mu_a: 1.0, mu_b: 1.0 };
        let psi = entangled_thermal_state(&spec).unwrap();
        let rho = psi.density().unwrap();
        for w in 0..2 {
            let m = marginal(&rho, w).unwrap();
            assert!(max_abs(&(m.matrix() - identity(2) * Complex64::new(0.5, 0.0))) < 1e-10);
        }

        let spec = EntangledThermalSpec { epsilon: vec![0.0, 1.0, 2.0, 3.0], gamma: 1.0, mu_a: 1.0, mu_b: 0.5 };
        let psi = entangled_thermal_state(&spec).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let z: f64 = (0..4).map(|i| (-(i as f64)).exp()).sum();
        for i in 0..4 {
            let want = (-(i as f64)).exp() / z;
            assert!((psi.amplitudes[i * 4 + i].norm_sqr() - want).abs() < 1e-4);
            assert!((psi.amplitudes[i * 4 + i].norm_sqr() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn entangled_state_marginals_are_gibbs() {
        let spec = EntangledThermalSpec { epsilon: vec![0.0, 1.0, 2.0, 3.0], gamma: 1.0, mu_a: 1.0, mu_b: 0.5 };
        let rho = entangled_thermal_state(&spec).unwrap().density().unwrap();
        let ga = gibbs_state(&HamiltonianSpec::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap(), 1.0).unwrap();
        let gb = gibbs_state(&HamiltonianSpec::new(vec![0.0, 2.0, 4.0, 6.0]).unwrap(), 0.5).unwrap();
        assert!(max_abs(&(marginal(&rho, 0).unwrap().matrix() - ga.matrix())) < 1e-10);
        assert!(max_abs(&(marginal(&rho, 1).unwrap().matrix() - gb.matrix())) < 1e-10);
        assert!((spec.beta_a() - 1.0).abs() < 1e-15 && (spec.beta_b() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn entangled_spec_validation() {
        let ok = EntangledThermalSpec { epsilon: vec![0.0, 1.0], gamma: 1.0, mu_a: 1.0, mu_b: 1.0 };
        assert!(ok.validate().is_ok());
        for bad in [
            EntangledThermalSpec { gamma: 0.0, ..ok.clone() },
            EntangledThermalSpec { mu_a: -1.0, ..ok.clone() },
            EntangledThermalSpec { epsilon: vec![0.5, 1.0], ..ok.clone() },
            EntangledThermalSpec { epsilon: vec![0.0, 2.0, 1.0], ..ok.clone() },
            EntangledThermalSpec { epsilon: vec![0.0], ..ok.clone() },
        ] {
            assert!(matches!(entangled_thermal_state(&bad), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn marginal_of_product_and_random_pure() {
        let mut rng = Stream::new(44, 0);
        let a = DensityOperator::new(random_density(2, 2, &mut rng).unwrap(), SubsystemDims::single(2)).unwrap();
        let b = DensityOperator::new(random_density(2, 1, &mut rng).unwrap(), SubsystemDims::single(2)).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert!(max_abs(&(marginal(&ab, 0).unwrap().matrix() - a.matrix())) < 1e-14);

        let psi = random_density(9, 1, &mut rng).unwrap();
        let rho = DensityOperator::new(psi, SubsystemDims::new(vec![3, 3]).unwrap()).unwrap();
        let sa = von_neumann_entropy(&marginal(&rho, 0).unwrap());
        let sb = von_neumann_entropy(&marginal(&rho, 1).unwrap());
        assert!((sa - sb).abs() < 1e-9);
        let (ea, eb) = (marginal(&rho, 0).unwrap(), marginal(&rho, 1).unwrap());
        for (x, y) in ea.spectrum().values.iter().zip(&eb.spectrum().values) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn evolve_keeps_exact_spectrum() {
        let h = HamiltonianSpec::new(vec![0.0, 3.0]).unwrap();
        let g = gibbs_state(&h, 10.0).unwrap();
        let u = qmath::haar_unitary(2, &mut Stream::new(45, 0));
        let moved = g.evolve(&u).unwrap();
        assert_eq!(moved.spectrum().values, g.spectrum().values);
        assert!(relative_entropy(&moved, &moved).unwrap().abs() < 1e-12);
    }
}
