//! The two worked state pairs used throughout the regression tests and the
//! `reproduce` command.

use crate::error::Result;
use crate::matops::ComplexMatrix;
use crate::states::{two_qubit_correlated, DensityMatrix};

/// `|ψ⟩ = (√3/2)|00⟩ + ½|11⟩` and `|φ⟩ = ½|00⟩ + (√3/2)|11⟩` as projectors.
/// `|⟨ψ|φ⟩|² = 3/4`, so `ρ − σ` has spectrum `(½, 0, 0, −½)`.
pub fn example1_pair() -> (DensityMatrix, DensityMatrix) {
    let s3 = 3f64.sqrt() / 2.0;
    (
        two_qubit_correlated(s3, 0.5).expect("nonzero vector"),
        two_qubit_correlated(0.5, s3).expect("nonzero vector"),
    )
}

/// `diag(½, ½, 0, 0)` and `diag(0, 0, ½, ½)`.
pub fn example2_pair() -> (DensityMatrix, DensityMatrix) {
    let build = |d: &[f64]| -> Result<DensityMatrix> { DensityMatrix::new(ComplexMatrix::from_diagonal(d)) };
    (
        build(&[0.5, 0.5, 0.0, 0.0]).expect("valid diagonal state"),
        build(&[0.0, 0.0, 0.5, 0.5]).expect("valid diagonal state"),
    )
}
