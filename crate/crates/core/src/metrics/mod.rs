//! Distances between states: trace metric, the pure-state maximization
//! metric (spectral norm of `ρ − σ`), the mixed-state maximization metric
//! `D_G(ρ,σ) = max_τ |G(ρ,τ) − G(σ,τ)|`, a brute-force lower bound for it,
//! and its closed-form upper bound.
//!
//! # Computing `D_G`
//!
//! For fixed `ρ, σ` the objective is
//! `f(τ) = Tr[(ρ−σ)τ] + c·√(1−Trτ²)` with `c = √(1−Trρ²) − √(1−Trσ²)`.
//! The second term only sees the spectrum of `τ`, and for a fixed spectrum
//! the linear term is extremal when `τ` shares the eigenbasis of `ρ − σ`
//! (von Neumann's trace inequality). So `max |f|` reduces to two smooth
//! problems over the probability simplex, `max ±(δ·t + c√(1−|t|²))`, where
//! `δ` are the eigenvalues of `ρ − σ`. Exactly one of the two branches is
//! concave; the other is convex and peaks at a vertex, which the vertex
//! starting points cover.

pub mod simplex;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::{linear_entropy, super_fidelity};
use crate::matops::{hermitian_eig, spectral_norm, trace_norm, EigenSystem};
use crate::random::rng_from_seed;
use crate::states::{ensure_same_dim, random_density_with, DensityMatrix};

pub use simplex::OptimizerOptions;
use simplex::{maximize, AscentResult, SimplexObjective};

// Floor on √(1−|t|²) inside the gradient; at a vertex the true gradient is
// unbounded.
const ROOT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    Dtr,
    Dpg,
    Dg,
    DgOracle,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Dtr => "Dtr",
            MetricKind::Dpg => "Dpg",
            MetricKind::Dg => "Dg",
            MetricKind::DgOracle => "DgOracle",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Dtr" => Ok(MetricKind::Dtr),
            "Dpg" => Ok(MetricKind::Dpg),
            "Dg" => Ok(MetricKind::Dg),
            "DgOracle" => Ok(MetricKind::DgOracle),
            other => Err(Error::Format(format!("unknown metric {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub restarts: usize,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct MetricReport {
    pub measure: MetricKind,
    pub value: f64,
    /// A state attaining `value` (the maximizing `τ`), when the measure is a
    /// maximization.
    pub witness: Option<DensityMatrix>,
    pub diagnostics: Diagnostics,
}

/// Spectrum of `ρ − σ` and the two one-sided maxima it determines.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    /// Eigenvalues of `ρ − σ`, sorted descending.
    pub deltas: Vec<f64>,
    /// `E(ρ,σ) = δ₁ = max over pure τ of Tr[τ(ρ−σ)]`.
    pub e_forward: f64,
    /// `E(σ,ρ) = −δ_N`.
    pub e_backward: f64,
}

fn difference_eig(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EigenSystem> {
    ensure_same_dim(rho, sigma)?;
    hermitian_eig(&(rho.matrix() - sigma.matrix()))
}

pub fn spectral_summary(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<SpectralSummary> {
    let eig = difference_eig(rho, sigma)?;
    Ok(summary_from(&eig))
}

fn summary_from(eig: &EigenSystem) -> SpectralSummary {
    let deltas = eig.eigenvalues.clone();
    let e_forward = deltas[0];
    let e_backward = -deltas[deltas.len() - 1];
    SpectralSummary {
        deltas,
        e_forward,
        e_backward,
    }
}

/// `½ Tr|ρ − σ|`.
pub fn trace_metric(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(rho, sigma)?;
    Ok(0.5 * trace_norm(&(rho.matrix() - sigma.matrix()))?)
}

/// Largest eigenvalue of `ρ − σ`. Not symmetric in its arguments.
pub fn e_value(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(spectral_summary(rho, sigma)?.e_forward)
}

/// Maximum of `|Tr[τ(ρ−σ)]|` over pure `τ`, which is the spectral norm of
/// `ρ − σ`. The witness projects onto the eigenvector of the eigenvalue with
/// the largest magnitude (the top one on ties).
pub fn pg_metric(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<MetricReport> {
    let eig = difference_eig(rho, sigma)?;
    let summary = summary_from(&eig);
    let (index, value) = if summary.e_forward >= summary.e_backward {
        (0, summary.e_forward)
    } else {
        (eig.dim() - 1, summary.e_backward)
    };
    let witness = DensityMatrix::from_trusted(eig.projector(index).symmetrized());
    let attained = (super_fidelity(rho, &witness)? - super_fidelity(sigma, &witness)?).abs();
    Ok(MetricReport {
        measure: MetricKind::Dpg,
        value,
        witness: Some(witness),
        diagnostics: Diagnostics {
            restarts: 0,
            iterations: 0,
            residual: (attained - value).abs(),
        },
    })
}

/// Spectral norm of `ρ − σ` computed directly.
pub fn spectral_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(rho, sigma)?;
    spectral_norm(&(rho.matrix() - sigma.matrix()))
}

/// `±(δ·t + c·√(1−|t|²))` on the simplex.
struct Branch<'a> {
    deltas: &'a [f64],
    entropy_gap: f64,
    sign: f64,
}

impl SimplexObjective for Branch<'_> {
    fn value(&self, t: &[f64]) -> f64 {
        let linear: f64 = self.deltas.iter().zip(t).map(|(d, x)| d * x).sum();
        let norm_sqr: f64 = t.iter().map(|x| x * x).sum();
        self.sign * (linear + self.entropy_gap * (1.0 - norm_sqr).max(0.0).sqrt())
    }

    fn gradient(&self, t: &[f64], out: &mut [f64]) {
        let norm_sqr: f64 = t.iter().map(|x| x * x).sum();
        let root = (1.0 - norm_sqr).max(0.0).sqrt().max(ROOT_FLOOR);
        for ((o, d), x) in out.iter_mut().zip(self.deltas).zip(t) {
            *o = self.sign * (d - self.entropy_gap * x / root);
        }
    }
}

/// `max_τ |G(ρ,τ) − G(σ,τ)|` over all density matrices `τ`.
pub fn g_metric(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    opts: &OptimizerOptions,
) -> Result<MetricReport> {
    let eig = difference_eig(rho, sigma)?;
    let entropy_gap = linear_entropy(rho).sqrt() - linear_entropy(sigma).sqrt();
    let dim = eig.dim();

    let solve = |sign: f64| -> AscentResult {
        let branch = Branch {
            deltas: &eig.eigenvalues,
            entropy_gap,
            sign,
        };
        maximize(&branch, dim, opts)
    };
    let forward = solve(1.0);
    let backward = solve(-1.0);
    let best = if backward.value > forward.value {
        backward
    } else {
        forward
    };

    let witness = DensityMatrix::from_trusted(eig.compose(&best.point).symmetrized());
    let value = (super_fidelity(rho, &witness)? - super_fidelity(sigma, &witness)?).abs();
    let residual = best.last_gain.max((value - best.value).abs());
    let restarts = 1 + dim + opts.restarts;
    if residual > opts.tolerance {
        return Err(Error::OptimizerFailure {
            residual,
            tolerance: opts.tolerance,
            restarts,
        });
    }
    Ok(MetricReport {
        measure: MetricKind::Dg,
        value,
        witness: Some(witness),
        diagnostics: Diagnostics {
            restarts,
            iterations: best.iterations,
            residual,
        },
    })
}

/// Brute-force lower bound on `D_G`: the best `|G(ρ,τ) − G(σ,τ)|` over
/// `samples` random states of random rank, the eigenprojectors of `ρ − σ`
/// and the maximally mixed state.
pub fn g_metric_oracle(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let eig = difference_eig(rho, sigma)?;
    let dim = rho.dim();
    let gap = |tau: &DensityMatrix| -> Result<f64> {
        Ok((super_fidelity(rho, tau)? - super_fidelity(sigma, tau)?).abs())
    };
    let mut best = gap(&DensityMatrix::maximally_mixed(dim))?;
    for k in 0..dim {
        let projector = DensityMatrix::from_trusted(eig.projector(k).symmetrized());
        best = best.max(gap(&projector)?);
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..samples {
        let rank = rng.random_range(1..=dim);
        let tau = random_density_with(&mut rng, dim, rank)?;
        best = best.max(gap(&tau)?);
    }
    Ok(best)
}

/// `√(2(N−1)/N) · √(1 − G(ρ,σ))`, an upper bound on `D_G`.
pub fn g_metric_bound(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let g = super_fidelity(rho, sigma)?.clamp(0.0, 1.0);
    let n = rho.dim() as f64;
    Ok((2.0 * (n - 1.0) / n).sqrt() * (1.0 - g).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::metric_c;
    use crate::matops::ComplexMatrix;
    use crate::states::{random_density, two_qubit_correlated};

    fn example1() -> (DensityMatrix, DensityMatrix) {
        let s3 = 3f64.sqrt() / 2.0;
        (
            two_qubit_correlated(s3, 0.5).unwrap(),
            two_qubit_correlated(0.5, s3).unwrap(),
        )
    }

    fn diag(d: &[f64]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_diagonal(d)).unwrap()
    }

    /// Exact maximum of the two-branch reduction, independent of the ascent.
    ///
    /// The branch whose root coefficient `k = s·c` is positive is concave;
    /// its KKT conditions give `tᵢ = (dᵢ − μ)₊ / Σ(dⱼ − μ)₊` with `μ` the
    /// root of `(Σ sᵢ)² − Σ sᵢ² = k²`, `sᵢ = (dᵢ − μ)₊`, and optimal value
    /// `d·t + k²/Σsᵢ`. The other branch is convex or linear, so its maximum
    /// is the largest vertex value.
    fn kkt_oracle(deltas: &[f64], c: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for sign in [1.0, -1.0] {
            let d: Vec<f64> = deltas.iter().map(|x| sign * x).collect();
            let k = sign * c;
            let vertex_max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if k <= 0.0 {
                best = best.max(vertex_max);
                continue;
            }
            let h = |mu: f64| {
                let s: Vec<f64> = d.iter().map(|x| (x - mu).max(0.0)).collect();
                let sum: f64 = s.iter().sum();
                let sq: f64 = s.iter().map(|x| x * x).sum();
                (sum * sum - sq - k * k, s, sum)
            };
            let mut hi = vertex_max;
            let mut lo = d.iter().cloned().fold(f64::INFINITY, f64::min) - k - 1.0;
            for _ in 0..300 {
                let mid = 0.5 * (lo + hi);
                if h(mid).0 > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (_, s, sum) = h(0.5 * (lo + hi));
            let value: f64 = d.iter().zip(&s).map(|(x, si)| x * si / sum).sum::<f64>() + k * k / sum;
            best = best.max(value).max(vertex_max);
        }
        best
    }

    #[test]
    fn trace_metric_examples() {
        let rho = random_density(3, 2, 1).unwrap();
        assert!(trace_metric(&rho, &rho).unwrap().abs() < 1e-12);
        assert!((trace_metric(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap() - 1.0).abs() < 1e-15);
        let (r, s) = example1();
        assert!((trace_metric(&r, &s).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn e_value_examples() {
        let rho = random_density(3, 3, 2).unwrap();
        assert!(e_value(&rho, &rho).unwrap().abs() < 1e-12);
        assert!((e_value(&diag(&[1.0, 0.0]), &DensityMatrix::maximally_mixed(2)).unwrap() - 0.5).abs() < 1e-15);
        let a = diag(&[0.9, 0.1, 0.0]);
        let b = DensityMatrix::maximally_mixed(3);
        let summary = spectral_summary(&a, &b).unwrap();
        assert!((summary.e_forward - (0.9 - 1.0 / 3.0)).abs() < 1e-12);
        assert!((summary.e_backward - 1.0 / 3.0).abs() < 1e-12);
        assert!((e_value(&b, &a).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(summary.deltas.iter().sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn pg_metric_examples() {
        let (r, s) = example1();
        let report = pg_metric(&r, &s).unwrap();
        assert!((report.value - 0.5).abs() < 1e-9);
        assert!(report.diagnostics.residual < 1e-12);
        let w = report.witness.unwrap();
        assert!((w.purity() - 1.0).abs() < 1e-12);
        let rho = random_density(4, 2, 3).unwrap();
        assert!(pg_metric(&rho, &rho).unwrap().value.abs() < 1e-12);
        for seed in 0..20 {
            let a = random_density(2, 1 + seed as usize % 2, seed).unwrap();
            let b = random_density(2, 2, seed + 500).unwrap();
            let pg = pg_metric(&a, &b).unwrap().value;
            assert!((pg - trace_metric(&a, &b).unwrap()).abs() < 1e-9);
            assert_eq!(pg, spectral_distance(&a, &b).unwrap());
        }
    }

    #[test]
    fn dim_mismatch_everywhere() {
        let a = DensityMatrix::maximally_mixed(2);
        let b = DensityMatrix::maximally_mixed(3);
        let opts = OptimizerOptions::default();
        assert!(matches!(trace_metric(&a, &b), Err(Error::DimMismatch { .. })));
        assert!(matches!(e_value(&a, &b), Err(Error::DimMismatch { .. })));
        assert!(matches!(pg_metric(&a, &b), Err(Error::DimMismatch { .. })));
        assert!(matches!(g_metric(&a, &b, &opts), Err(Error::DimMismatch { .. })));
        assert!(matches!(g_metric_bound(&a, &b), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn g_metric_example1() {
        let (r, s) = example1();
        let report = g_metric(&r, &s, &OptimizerOptions::default()).unwrap();
        assert!((report.value - 0.5).abs() < 1e-6, "{}", report.value);
        let bound = g_metric_bound(&r, &s).unwrap();
        assert!((bound - 0.375f64.sqrt()).abs() < 1e-12);
        assert!(bound - report.value > 0.11);
    }

    #[test]
    fn g_metric_identical_states() {
        let rho = random_density(3, 2, 8).unwrap();
        let report = g_metric(&rho, &rho, &OptimizerOptions::default()).unwrap();
        assert!(report.value.abs() < 1e-12);
        assert!(g_metric_bound(&rho, &rho).unwrap().abs() < 1e-6);
        assert!(g_metric_oracle(&rho, &rho, 100, 1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn g_metric_qubits_match_c() {
        let opts = OptimizerOptions::default();
        for seed in 0..40 {
            let a = random_density(2, 1 + seed as usize % 2, seed).unwrap();
            let b = random_density(2, 1 + (seed as usize / 2) % 2, seed + 99).unwrap();
            let dg = g_metric(&a, &b, &opts).unwrap().value;
            let c = metric_c(&a, &b).unwrap();
            assert!((dg - c).abs() < 1e-6, "seed {seed}: {dg} vs {c}");
            assert!((g_metric_bound(&a, &b).unwrap() - c).abs() < 1e-12);
        }
    }

    #[test]
    fn g_metric_matches_kkt_solution() {
        let opts = OptimizerOptions::default();
        for dim in 2..=5 {
            for seed in 0..30 {
                let a = random_density(dim, 1 + seed as usize % dim, seed).unwrap();
                let b = random_density(dim, 1 + (seed as usize * 7) % dim, seed + 1234).unwrap();
                let summary = spectral_summary(&a, &b).unwrap();
                let c = linear_entropy(&a).sqrt() - linear_entropy(&b).sqrt();
                let exact = kkt_oracle(&summary.deltas, c);
                let report = g_metric(&a, &b, &opts).unwrap();
                assert!(
                    (report.value - exact).abs() < 1e-9,
                    "dim {dim} seed {seed}: {} vs {exact}",
                    report.value
                );
            }
        }
    }

    #[test]
    fn g_metric_dominates_oracle_and_pg() {
        let opts = OptimizerOptions::default();
        for dim in 2..=4 {
            for seed in 0..5 {
                let a = random_density(dim, dim, seed).unwrap();
                let b = random_density(dim, 1, seed + 40).unwrap();
                let report = g_metric(&a, &b, &opts).unwrap();
                let oracle = g_metric_oracle(&a, &b, 2000, seed).unwrap();
                assert!(report.value >= oracle - 1e-9);
                assert!(report.value >= pg_metric(&a, &b).unwrap().value - 1e-9);
                assert!(report.value <= g_metric_bound(&a, &b).unwrap() + 1e-9);
                let w = report.witness.unwrap();
                let attained = (super_fidelity(&a, &w).unwrap() - super_fidelity(&b, &w).unwrap()).abs();
                assert!((attained - report.value).abs() <= report.diagnostics.residual + 1e-15);
            }
        }
    }

    #[test]
    fn oracle_is_deterministic() {
        let a = random_density(3, 2, 1).unwrap();
        let b = random_density(3, 3, 2).unwrap();
        assert_eq!(
            g_metric_oracle(&a, &b, 500, 9).unwrap(),
            g_metric_oracle(&a, &b, 500, 9).unwrap()
        );
    }

    #[test]
    fn kind_round_trip() {
        for kind in [MetricKind::Dtr, MetricKind::Dpg, MetricKind::Dg, MetricKind::DgOracle] {
            assert_eq!(kind.name().parse::<MetricKind>().unwrap(), kind);
        }
    }
}
