//! Fidelity-family scalars: Uhlmann-Jozsa fidelity `F`, super-fidelity `G`
//! (matrix and Bloch forms) and the derived functions `A`, `B`, `C`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{hermitian_eigenvalues, noise_floor, psd_sqrt, PSD_TOL};
use crate::states::{bloch_to_density, ensure_same_dim, BlochState, DensityMatrix};

const PURITY_NOISE: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FidelityMeasure {
    F,
    G,
    A,
    B,
    C,
}

impl FidelityMeasure {
    pub fn name(self) -> &'static str {
        match self {
            FidelityMeasure::F => "F",
            FidelityMeasure::G => "G",
            FidelityMeasure::A => "A",
            FidelityMeasure::B => "B",
            FidelityMeasure::C => "C",
        }
    }

    /// Closed range the measure takes values in.
    pub fn range(self) -> (f64, f64) {
        match self {
            FidelityMeasure::F | FidelityMeasure::G | FidelityMeasure::C => (0.0, 1.0),
            FidelityMeasure::A => (0.0, std::f64::consts::FRAC_PI_2),
            FidelityMeasure::B => (0.0, std::f64::consts::SQRT_2),
        }
    }
}

impl fmt::Display for FidelityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FidelityMeasure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F" => Ok(FidelityMeasure::F),
            "G" => Ok(FidelityMeasure::G),
            "A" => Ok(FidelityMeasure::A),
            "B" => Ok(FidelityMeasure::B),
            "C" => Ok(FidelityMeasure::C),
            other => Err(Error::Format(format!("unknown fidelity measure {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityValue {
    pub measure: FidelityMeasure,
    pub value: f64,
}

pub fn evaluate(
    measure: FidelityMeasure,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<FidelityValue> {
    let value = match measure {
        FidelityMeasure::F => uhlmann_fidelity(rho, sigma)?,
        FidelityMeasure::G => super_fidelity(rho, sigma)?,
        FidelityMeasure::A => metric_a(rho, sigma)?,
        FidelityMeasure::B => metric_b(rho, sigma)?,
        FidelityMeasure::C => metric_c(rho, sigma)?,
    };
    Ok(FidelityValue { measure, value })
}

/// `[Tr √(√ρ σ √ρ)]²`, evaluated as `(Σ √μᵢ)²` over the eigenvalues of
/// `√ρ σ √ρ` (negatives down to `-1e-10` and noise-level positives clipped to
/// zero).
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(rho, sigma)?;
    let root = psd_sqrt(rho.matrix())?;
    let inner = (&(&root * sigma.matrix()) * &root).symmetrized();
    let spectrum = hermitian_eigenvalues(&inner)?;
    let floor = noise_floor(&spectrum);
    let mut sum = 0.0;
    for mu in spectrum {
        if mu < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: mu });
        }
        if mu > floor {
            sum += mu.sqrt();
        }
    }
    Ok(sum * sum)
}

/// `½[1 + u·v + √(1−|u|²)√(1−|v|²)]` for two qubit Bloch vectors.
pub fn qubit_fidelity_bloch(u: &BlochState, v: &BlochState) -> Result<f64> {
    if u.dim != 2 {
        return Err(Error::NotQubit(u.dim));
    }
    if v.dim != 2 {
        return Err(Error::NotQubit(v.dim));
    }
    let ru = bloch_radicand(u).sqrt();
    let rv = bloch_radicand(v).sqrt();
    Ok(0.5 * (1.0 + u.dot(v) + ru * rv))
}

/// `1 − |u|²`, clamped and snapped like [`linear_entropy`].
fn bloch_radicand(u: &BlochState) -> f64 {
    snap(1.0 - u.norm().powi(2))
}

fn snap(value: f64) -> f64 {
    let value = value.clamp(0.0, 1.0);
    if value <= PURITY_NOISE {
        0.0
    } else {
        value
    }
}

/// `1 − Tr ρ²` clamped to `[0, 1]`, with rounding-level values snapped to
/// zero so pure states do not pick up a `√ε`-sized error.
pub(crate) fn linear_entropy(rho: &DensityMatrix) -> f64 {
    snap(1.0 - rho.purity())
}

/// Super-fidelity from precomputed overlap and linear entropies.
pub(crate) fn super_fidelity_parts(overlap: f64, entropy_a: f64, entropy_b: f64) -> f64 {
    overlap + (entropy_a * entropy_b).sqrt()
}

/// `Tr(ρσ) + √((1−Trρ²)(1−Trσ²))`.
pub fn super_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(rho, sigma)?;
    Ok(super_fidelity_parts(
        rho.overlap(sigma),
        linear_entropy(rho),
        linear_entropy(sigma),
    ))
}

/// `(1/N)[1 + (N−1)u·v + (N−1)√((1−|u|²)(1−|v|²))]`. Both vectors must lie in
/// the state body; that is checked by converting them.
pub fn super_fidelity_bloch(u: &BlochState, v: &BlochState) -> Result<f64> {
    if u.dim != v.dim {
        return Err(Error::DimMismatch {
            left: u.dim,
            right: v.dim,
        });
    }
    bloch_to_density(u)?;
    bloch_to_density(v)?;
    let n = u.dim as f64;
    let ru = bloch_radicand(u);
    let rv = bloch_radicand(v);
    Ok((1.0 + (n - 1.0) * u.dot(v) + (n - 1.0) * (ru * rv).sqrt()) / n)
}

fn clamped_g(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(super_fidelity(rho, sigma)?.clamp(0.0, 1.0))
}

/// `arccos √G`.
pub fn metric_a(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(clamped_g(rho, sigma)?.sqrt().acos())
}

/// `√(2 − 2√G)`.
pub fn metric_b(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok((2.0 - 2.0 * clamped_g(rho, sigma)?.sqrt()).max(0.0).sqrt())
}

/// `√(1 − G)`.
pub fn metric_c(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok((1.0 - clamped_g(rho, sigma)?).sqrt())
}
