//! Dense complex-matrix primitives: Hermitian eigendecomposition, PSD square
//! root and the two unitarily invariant norms the distance measures need.
//!
//! Every routine here is a pure function of its input. Hermitian inputs are
//! accepted within [`HERMITIAN_TOL`] (max-entry norm) and symmetrized as
//! `(M + Mᴴ)/2` before decomposition.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Max-entry residual allowed between `M` and `Mᴴ`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues at or above `-PSD_TOL` are clipped to zero by PSD routines.
pub const PSD_TOL: f64 = 1e-10;
/// Largest dimension accepted by the dense routines.
pub const MAX_DIM: usize = 64;

/// Relative eigenvalue noise floor: PSD routines treat eigenvalues below
/// `EIG_NOISE · max(1, λ_max)` as exact zeros before taking square roots.
pub const EIG_NOISE: f64 = 16.0 * f64::EPSILON;

const EIG_MAX_ITER: usize = 10_000;
const DEGENERACY_TOL: f64 = 1e-12;
const ZERO_ENTRY_TOL: f64 = 1e-12;

/// A square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(Error::DimensionTooSmall(0));
        }
        if inner.nrows() > MAX_DIM {
            return Err(Error::DimensionTooLarge(inner.nrows()));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(inner))
    }

    /// Wraps a matrix the caller knows is square, finite and within the cap.
    pub(crate) fn from_inner(inner: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        Self(inner)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Outer product `v vᴴ`.
    pub fn outer(v: &DVector<Complex64>) -> Self {
        Self(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M_ij − conj(M_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn symmetrized(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// `Tr(A·B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.0[(i, j)] * other.0[(j, i)];
            }
        }
        acc
    }

    /// Conjugation `U M Uᴴ`.
    pub fn conjugate_by(&self, unitary: &Self) -> Self {
        Self(&unitary.0 * &self.0 * unitary.0.adjoint())
    }

    fn check_hermitian(&self) -> Result<Self> {
        let residual = self.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NonHermitian { residual });
        }
        Ok(self.symmetrized())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// Eigenvalues sorted descending, with column `k` of `eigenvectors` paired
/// with `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.eigenvectors.0.column(k).into_owned()
    }

    /// Rank-one projector onto eigenvector `k`.
    pub fn projector(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vector(k))
    }

    /// `V diag(f(λ)) Vᴴ`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors.0;
        let n = self.dim();
        let mut scaled = v.clone();
        for k in 0..n {
            let w = f(self.eigenvalues[k]);
            scaled.column_mut(k).scale_mut(w);
        }
        ComplexMatrix(&scaled * v.adjoint())
    }

    /// `V diag(weights) Vᴴ`; `weights[k]` attaches to eigenvector `k`.
    pub fn compose(&self, weights: &[f64]) -> ComplexMatrix {
        let v = &self.eigenvectors.0;
        let mut scaled = v.clone();
        for (k, &w) in weights.iter().enumerate() {
            scaled.column_mut(k).scale_mut(w);
        }
        ComplexMatrix(&scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }

    /// Frobenius norm of `VᴴV − I`.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = &self.eigenvectors.0;
        let gram = v.adjoint() * v - DMatrix::<Complex64>::identity(self.dim(), self.dim());
        gram.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Decomposes a Hermitian matrix.
///
/// Eigenvectors are phase-fixed so their first non-negligible entry is real
/// and positive. Within a cluster of eigenvalues closer than `1e-12` the
/// columns are ordered by a descending lexicographic comparison of their
/// entries (real part, then imaginary part), so the output is fully
/// determined by the input.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenSystem> {
    let h = m.check_hermitian()?;
    let n = h.dim();
    let decomposition = SymmetricEigen::try_new(h.0, f64::EPSILON, EIG_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?;
    if decomposition.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }

    let mut columns: Vec<(f64, DVector<Complex64>)> = (0..n)
        .map(|k| {
            let mut col = decomposition.eigenvectors.column(k).into_owned();
            fix_phase(&mut col);
            (decomposition.eigenvalues[k], col)
        })
        .collect();
    columns.sort_by(|a, b| b.0.total_cmp(&a.0));

    let scale = columns.iter().map(|c| c.0.abs()).fold(1.0, f64::max);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && columns[end - 1].0 - columns[end].0 <= DEGENERACY_TOL * scale {
            end += 1;
        }
        if end - start > 1 {
            columns[start..end].sort_by(|a, b| lexicographic(&b.1, &a.1));
        }
        start = end;
    }

    let eigenvalues = columns.iter().map(|c| c.0).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, k| columns[k].1[i]);
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors: ComplexMatrix(eigenvectors),
    })
}

fn fix_phase(col: &mut DVector<Complex64>) {
    if let Some(z) = col.iter().copied().find(|z| z.norm() > ZERO_ENTRY_TOL) {
        let phase = z.conj() / z.norm();
        for entry in col.iter_mut() {
            *entry *= phase;
        }
        // Remove the rounding residue left on the pivot's imaginary part.
        if let Some(pivot) = col.iter_mut().find(|z| z.norm() > ZERO_ENTRY_TOL) {
            pivot.im = 0.0;
        }
    }
}

fn lexicographic(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Hermitian eigenvalues only, sorted descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(m)?.eigenvalues)
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-1e-10, 0)` and
/// positive ones under the [`EIG_NOISE`] floor are clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let floor = noise_floor(&eig.eigenvalues);
    Ok(eig
        .map_spectrum(|x| if x <= floor { 0.0 } else { x.sqrt() })
        .symmetrized())
}

/// Absolute threshold under which a PSD eigenvalue is indistinguishable from
/// zero for a spectrum sorted descending.
pub fn noise_floor(sorted_desc: &[f64]) -> f64 {
    EIG_NOISE * sorted_desc.first().copied().unwrap_or(0.0).max(1.0)
}

/// `Σ |λᵢ|`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|x| x.abs()).sum())
}

/// `max |λᵢ|`, the largest singular value of a Hermitian matrix.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn example1_difference() -> ComplexMatrix {
        let s3 = 3f64.sqrt() / 2.0;
        let psi = DVector::from_vec(vec![c(s3, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        let phi = DVector::from_vec(vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s3, 0.0)]);
        &ComplexMatrix::outer(&psi) - &ComplexMatrix::outer(&phi)
    }

    fn hermitian_from_parts(n: usize, parts: &[f64]) -> ComplexMatrix {
        let raw = DMatrix::from_fn(n, n, |i, j| c(parts[2 * (i * n + j)], parts[2 * (i * n + j) + 1]));
        ComplexMatrix::from_inner((&raw + raw.adjoint()) * c(0.5, 0.0))
    }

    #[test]
    fn identity_spectrum() {
        let eig = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
        // degenerate cluster resolves to the standard basis order
        assert!((eig.eigenvectors.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((eig.eigenvectors.get(1, 1) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_spectrum() {
        let eig = hermitian_eig(&ComplexMatrix::from_diagonal(&[0.3, 0.7])).unwrap();
        assert!((eig.eigenvalues[0] - 0.7).abs() < 1e-15);
        assert!((eig.eigenvalues[1] - 0.3).abs() < 1e-15);
        assert!((eig.eigenvectors.get(1, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((eig.eigenvectors.get(0, 1) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn example1_difference_spectrum() {
        let eig = hermitian_eig(&example1_difference()).unwrap();
        let expected = [0.5, 0.0, 0.0, -0.5];
        for (got, want) in eig.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]])
            .unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NonHermitian { .. })));
        assert!(matches!(trace_norm(&m), Err(Error::NonHermitian { .. })));
        assert!(matches!(spectral_norm(&m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.5, 1e-12)],
            vec![c(0.5, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.eigenvalues[0] - 1.5).abs() < 1e-11);
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        assert!(matches!(
            ComplexMatrix::new(DMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let mut nan = DMatrix::<Complex64>::zeros(2, 2);
        nan[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(ComplexMatrix::new(nan), Err(Error::NonFinite)));
        assert!(matches!(
            ComplexMatrix::new(DMatrix::zeros(MAX_DIM + 1, MAX_DIM + 1)),
            Err(Error::DimensionTooLarge(_))
        ));
    }

    #[test]
    fn sqrt_examples() {
        let s = psd_sqrt(&ComplexMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert!((s.get(0, 0).re - 2.0).abs() < 1e-12);
        assert!((s.get(1, 1).re - 3.0).abs() < 1e-12);
        assert!(s.get(0, 1).norm() < 1e-12);

        let id = psd_sqrt(&ComplexMatrix::identity(5)).unwrap();
        assert!((&id - &ComplexMatrix::identity(5)).frobenius_norm() < 1e-12);

        let v = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let p = ComplexMatrix::outer(&v);
        assert!((&psd_sqrt(&p).unwrap() - &p).frobenius_norm() < 1e-9);
    }

    #[test]
    fn sqrt_rejects_negative_and_clips_noise() {
        assert!(matches!(
            psd_sqrt(&ComplexMatrix::from_diagonal(&[1.0, -0.1])),
            Err(Error::NotPsd { .. })
        ));
        let s = psd_sqrt(&ComplexMatrix::from_diagonal(&[1.0, -1e-13])).unwrap();
        assert_eq!(s.get(1, 1).re, 0.0);
    }

    #[test]
    fn norm_examples() {
        let d = ComplexMatrix::from_diagonal(&[0.5, -0.5]);
        assert!((trace_norm(&d).unwrap() - 1.0).abs() < 1e-15);
        assert!((spectral_norm(&d).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(trace_norm(&ComplexMatrix::zeros(3)).unwrap(), 0.0);
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(3)).unwrap(), 0.0);
        let diff = example1_difference();
        assert!((trace_norm(&diff).unwrap() - 1.0).abs() < 1e-12);
        assert!((spectral_norm(&diff).unwrap() - 0.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn eig_invariants(n in 2usize..=6, parts in proptest::collection::vec(-1.0f64..1.0, 72)) {
            let m = hermitian_from_parts(n, &parts);
            let eig = hermitian_eig(&m).unwrap();
            prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(eig.orthonormality_residual() <= 1e-10);
            let residual = (&eig.reconstruct() - &m).frobenius_norm();
            prop_assert!(residual <= 1e-9 * m.frobenius_norm().max(1.0));
        }

        #[test]
        fn norms_ordered(n in 2usize..=6, parts in proptest::collection::vec(-1.0f64..1.0, 72)) {
            let m = hermitian_from_parts(n, &parts);
            let tn = trace_norm(&m).unwrap();
            let sn = spectral_norm(&m).unwrap();
            prop_assert!(sn >= 0.0);
            prop_assert!(tn >= sn - 1e-12);
        }
    }
}
