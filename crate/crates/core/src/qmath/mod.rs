//! Dense complex linear algebra for small composite quantum systems.
//!
//! Conventions used throughout the crate:
//! - eigenvalues are returned in ascending order;
//! - factor 0 of a [`SubsystemDims`] is the leftmost Kronecker factor;
//! - Hermitian inputs are symmetrized as `(H + H^dag) / 2` before diagonalization.

mod rng;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub use rng::Stream;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Max-abs deviation of `H - H^dag` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Local Hilbert-space dimensions of a composite system, leftmost first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemDims(Vec<usize>);

impl SubsystemDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dimensions must be non-empty and positive, got {dims:?}"
            )));
        }
        Ok(Self(dims))
    }

    /// A single unstructured factor of dimension `d`.
    pub fn single(d: usize) -> Self {
        Self(vec![d.max(1)])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn num_factors(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Dimensions of the listed factors, in ascending factor order.
    pub fn select(&self, factors: &[usize]) -> Self {
        let mut f = factors.to_vec();
        f.sort_unstable();
        Self(f.iter().map(|&k| self.0[k]).collect())
    }

    pub fn concat(&self, other: &SubsystemDims) -> Self {
        let mut d = self.0.clone();
        d.extend_from_slice(&other.0);
        Self(d)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Diagonal matrix with real entries.
pub fn real_diag(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(values[i], 0.0)
        } else {
            ZERO
        }
    })
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

/// Max-abs deviation of `U^dag U` from the identity.
pub fn unitary_deviation(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Re tr(rho h)` without forming the product.
pub fn expectation(rho: &ComplexMatrix, h: &ComplexMatrix) -> f64 {
    let n = rho.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (rho[(i, j)] * h[(j, i)]).re;
        }
    }
    acc
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Spectral decomposition of a Hermitian matrix: `H = V diag(values) V^dag`.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// `V f(Λ) V^dag`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            for i in 0..n {
                scaled[(i, k)] *= fk;
            }
        }
        let m = scaled * self.vectors.adjoint();
        // exact Hermiticity, independent of the magnitude of f
        (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }
}

pub fn eig_hermitian(h: &ComplexMatrix) -> Result<Eigen> {
    let dev = hermitian_deviation(h);
    if dev.is_nan() || dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = h.nrows();
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 10_000 * n.max(1))
        .ok_or(Error::ConvergenceFailure(n))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Eigen { values, vectors })
}

/// Applies a real function to a Hermitian matrix through its spectrum.
pub fn func_hermitian(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(h)?.apply(f))
}

/// Flat offsets (relative to the joint index) of every configuration of the
/// listed factors, enumerated row-major in ascending factor order.
fn factor_offsets(dims: &[usize], factors: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut offsets = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(offsets.len() * dims[f]);
        for &o in &offsets {
            for digit in 0..dims[f] {
                next.push(o + digit * strides[f]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Traces out every factor not listed in `keep`. The kept factors appear in
/// ascending order in the result.
pub fn partial_trace(m: &ComplexMatrix, dims: &SubsystemDims, keep: &[usize]) -> Result<ComplexMatrix> {
    let n = dims.total();
    if !m.is_square() || m.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix does not match subsystem dims {:?}",
            m.nrows(),
            m.ncols(),
            dims.as_slice()
        )));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() != keep.len() || kept.iter().any(|&k| k >= dims.num_factors()) {
        return Err(Error::DimensionMismatch(format!(
            "invalid factor set {keep:?} for {} factors",
            dims.num_factors()
        )));
    }
    let traced: Vec<usize> = (0..dims.num_factors()).filter(|k| !kept.contains(k)).collect();

    let kept_off = factor_offsets(dims.as_slice(), &kept);
    let traced_off = factor_offsets(dims.as_slice(), &traced);
    let r = kept_off.len();
    let mut out = ComplexMatrix::zeros(r, r);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &rb) in kept_off.iter().enumerate() {
            out[(a, b)] = traced_off.iter().map(|&t| m[(ra + t, rb + t)]).sum();
        }
    }
    Ok(out)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`. Consumes `2 d^2` stream words,
/// entries filled row by row.
pub fn haar_unitary(d: usize, rng: &mut Stream) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            g[(i, j)] = rng.complex_gaussian();
        }
    }
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random density matrix `G G^dag / tr(G G^dag)` with `G` a `d x rank`
/// complex Ginibre matrix. Consumes `2 d rank` stream words.
pub fn random_density(d: usize, rank: usize, rng: &mut Stream) -> Result<ComplexMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(Error::InvalidSpec(format!("random_density needs 1 <= rank <= d, got d={d}, rank={rank}")));
    }
    let mut g = ComplexMatrix::zeros(d, rank);
    for i in 0..d {
        for j in 0..rank {
            g[(i, j)] = rng.complex_gaussian();
        }
    }
    let mut rho = &g * g.adjoint();
    let tr = trace(&rho).re;
    rho /= Complex64::new(tr, 0.0);
    Ok(rho)
}

/// Trace distance `(1/2) ||a - b||_1` between Hermitian matrices.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let eig = eig_hermitian(&(a - b))?;
    Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
}
