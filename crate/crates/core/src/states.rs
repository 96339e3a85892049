//! Density matrices, Bloch vectors over the generalized Gell-Mann basis, and
//! seeded random-state sampling.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, InvalidReason, Result};
use crate::matops::{hermitian_eigenvalues, ComplexMatrix, HERMITIAN_TOL, PSD_TOL};
use crate::random::{ginibre, rng_from_seed};

/// Trace tolerance used when a density matrix is constructed.
pub const TRACE_TOL: f64 = 1e-10;
/// Looser trace tolerance for matrices produced by channel application.
pub const CHANNEL_TRACE_TOL: f64 = 1e-9;
const BLOCH_NORM_TOL: f64 = 1e-12;

/// A Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` as a quantum state. See [`make_density`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_trace_tolerance(matrix, TRACE_TOL)
    }

    pub fn with_trace_tolerance(matrix: ComplexMatrix, trace_tol: f64) -> Result<Self> {
        let residual = matrix.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::InvalidState {
                reason: InvalidReason::NonHermitian,
                residual,
            });
        }
        let matrix = matrix.symmetrized();
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > trace_tol {
            return Err(Error::InvalidState {
                reason: InvalidReason::TraceNotOne,
                residual: (trace - 1.0).abs(),
            });
        }
        let matrix = matrix.scale(1.0 / trace);
        let min = hermitian_eigenvalues(&matrix)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidState {
                reason: InvalidReason::NotPsd,
                residual: -min,
            });
        }
        Ok(Self { matrix })
    }

    /// Skips validation; the caller's construction must guarantee a state.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    /// `Tr(ρσ)`, real for Hermitian arguments.
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        self.matrix.trace_product(&other.matrix).re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be nonnegative and sum to one.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
        let first = states
            .first()
            .ok_or_else(|| Error::BadShape("empty mixture".into()))?;
        let mut acc = ComplexMatrix::zeros(first.dim());
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != first.dim() {
                return Err(Error::DimMismatch {
                    left: first.dim(),
                    right: s.dim(),
                });
            }
            acc = &acc + &s.matrix.scale(*w);
        }
        DensityMatrix::new(acc)
    }

    pub fn conjugate_by(&self, unitary: &ComplexMatrix) -> DensityMatrix {
        Self::from_trusted(self.matrix.conjugate_by(unitary).symmetrized())
    }
}

/// Validates a square matrix as a density matrix, symmetrizing it and
/// renormalizing a trace that is within `1e-10` of one.
pub fn make_density(matrix: ComplexMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(matrix)
}

pub(crate) fn ensure_same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.trace_product(&rho.matrix).re
}

/// Traceless Hermitian generators of SU(N) normalized to `Tr(λⱼλₖ) = 2δⱼₖ`.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    pub dim: usize,
    pub generators: Vec<ComplexMatrix>,
}

/// Generalized Gell-Mann matrices: symmetric `|j⟩⟨k| + |k⟩⟨j|`, then
/// antisymmetric `−i|j⟩⟨k| + i|k⟩⟨j|` (both over `j < k` in lexicographic
/// order), then the diagonal ones. For `dim = 2` this is `(σ₁, σ₂, σ₃)`.
pub fn gell_mann_basis(dim: usize) -> Result<GeneratorBasis> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    let zero = Complex64::new(0.0, 0.0);
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|j| ((j + 1)..dim).map(move |k| (j, k)))
        .collect();
    let mut generators = Vec::with_capacity(dim * dim - 1);
    for &(j, k) in &pairs {
        let mut m = DMatrix::from_element(dim, dim, zero);
        m[(j, k)] = Complex64::new(1.0, 0.0);
        m[(k, j)] = Complex64::new(1.0, 0.0);
        generators.push(ComplexMatrix::from_inner(m));
    }
    for &(j, k) in &pairs {
        let mut m = DMatrix::from_element(dim, dim, zero);
        m[(j, k)] = Complex64::new(0.0, -1.0);
        m[(k, j)] = Complex64::new(0.0, 1.0);
        generators.push(ComplexMatrix::from_inner(m));
    }
    for l in 1..dim {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; dim];
        diag[..l].iter_mut().for_each(|x| *x = norm);
        diag[l] = -(l as f64) * norm;
        generators.push(ComplexMatrix::from_diagonal(&diag));
    }
    Ok(GeneratorBasis { dim, generators })
}

/// Bloch vector `u` of an N-level state, `ρ(u) = (1/N)(I + √(N(N−1)/2) λ·u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochState {
    pub dim: usize,
    pub coeffs: Vec<f64>,
}

impl BlochState {
    pub fn new(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        let expected = dim * dim - 1;
        if coeffs.len() != expected {
            return Err(Error::BlochLength {
                dim,
                expected,
                got: coeffs.len(),
            });
        }
        let state = Self { dim, coeffs };
        let norm = state.norm();
        if norm > 1.0 + BLOCH_NORM_TOL {
            return Err(Error::BlochNormTooLarge { norm });
        }
        Ok(state)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &BlochState) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }
}

fn bloch_scale(dim: usize) -> f64 {
    let n = dim as f64;
    (n * (n - 1.0) / 2.0).sqrt()
}

/// Builds `ρ(u)`; fails with `NotPositive` when the operator has a negative
/// eigenvalue, i.e. `u` lies outside the state body.
pub fn bloch_to_density(b: &BlochState) -> Result<DensityMatrix> {
    let norm = b.norm();
    if norm > 1.0 + BLOCH_NORM_TOL {
        return Err(Error::BlochNormTooLarge { norm });
    }
    let basis = gell_mann_basis(b.dim)?;
    let n = b.dim as f64;
    let scale = bloch_scale(b.dim);
    let mut m = ComplexMatrix::identity(b.dim);
    for (lambda, &u) in basis.generators.iter().zip(&b.coeffs) {
        if u != 0.0 {
            m = &m + &lambda.scale(scale * u);
        }
    }
    let m = m.scale(1.0 / n);
    let min = hermitian_eigenvalues(&m)?.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(DensityMatrix::from_trusted(m))
}

/// Inverse of [`bloch_to_density`]: `uₖ = Tr(ρλₖ) / √(2(N−1)/N)`.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochState> {
    let dim = rho.dim();
    let basis = gell_mann_basis(dim)?;
    let n = dim as f64;
    let denom = (2.0 * (n - 1.0) / n).sqrt();
    let coeffs = basis
        .generators
        .iter()
        .map(|lambda| rho.matrix.trace_product(lambda).re / denom)
        .collect();
    Ok(BlochState { dim, coeffs })
}

/// Hilbert-Schmidt-style sample `AAᴴ / Tr(AAᴴ)` with `A` a `dim × rank`
/// complex Gaussian matrix. Rank one gives Haar-random pure states.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(&mut rng_from_seed(seed), dim, rank)
}

pub fn random_density_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim || dim == 0 {
        return Err(Error::BadRank { rank, dim });
    }
    let a = ginibre(rng, dim, rank);
    let m = ComplexMatrix::new(&a * a.adjoint())?;
    let trace = m.trace().re;
    Ok(DensityMatrix::from_trusted(m.scale(1.0 / trace).symmetrized()))
}

/// Normalized projector `vvᴴ / ‖v‖²`.
pub fn pure_from_vector(v: &[Complex64]) -> Result<DensityMatrix> {
    let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if norm_sqr <= 0.0 || !norm_sqr.is_finite() {
        return Err(Error::ZeroVector);
    }
    let v = DVector::from_iterator(v.len(), v.iter().map(|z| z / norm_sqr.sqrt()));
    let m = ComplexMatrix::new(&v * v.adjoint())?;
    Ok(DensityMatrix::from_trusted(m.symmetrized()))
}

/// `|ψ⟩ = a|00⟩ + b|11⟩` on two qubits, basis order `|00⟩,|01⟩,|10⟩,|11⟩`.
pub fn two_qubit_correlated(a: f64, b: f64) -> Result<DensityMatrix> {
    let c = |x: f64| Complex64::new(x, 0.0);
    pure_from_vector(&[c(a), c(0.0), c(0.0), c(b)])
}
