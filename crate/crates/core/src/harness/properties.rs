//! The registered verification properties.
//!
//! Each property draws from its own generator seeded with
//! `derive_seed(master, property_id)`, so results do not depend on which
//! other properties run or on scheduling. The channel properties share one
//! stream of (channel, pair) draws seeded from [`CHANNEL_DRAWS`], so they
//! all look at the same draws.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use crate::channels::{example2_channel, random_channel_with, KrausChannel};
use crate::error::{Error, Result};
use crate::fidelity::{metric_c, super_fidelity, uhlmann_fidelity};
use crate::fixtures::{example1_pair, example2_pair};
use crate::io::{ChannelFile, StateFile};
use crate::matops::{hermitian_eig, psd_sqrt, spectral_norm, trace_norm, ComplexMatrix};
use crate::metrics::{
    g_metric, g_metric_bound, g_metric_oracle, pg_metric, spectral_distance, trace_metric,
    OptimizerOptions,
};
use crate::random::{derive_seed, dirichlet_uniform, ginibre, haar_unitary, rng_from_seed, SeededRng};
use crate::states::{
    bloch_to_density, density_to_bloch, make_density, random_density_with, BlochState,
    DensityMatrix,
};

use super::verdict::{Kind, Tally};

/// Seed label of the shared channel draws.
pub const CHANNEL_DRAWS: &str = "channels.draws";
/// Haar pure states per pair in the pure-state cross-check.
pub const PURE_STATE_SAMPLES: usize = 10_000;
/// Power-iteration steps applied to the best sampled pure states.
pub const PURE_STATE_REFINEMENT: usize = 500;
/// Random states per pair in the brute-force `D_G` comparison.
pub const ORACLE_SAMPLES: usize = 10_000;

const LAMBDAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

pub struct Ctx<'a> {
    pub rng: SeededRng,
    pub samples: usize,
    pub per_dim: bool,
    pub dims: Vec<usize>,
    pub optimizer: &'a OptimizerOptions,
    pub master_seed: u64,
    pub tally: Tally,
}

type RunFn = fn(&mut Ctx) -> Result<()>;

/// A registered property with its default budget.
pub struct PropertyInfo {
    pub id: &'static str,
    pub kind: Kind,
    /// Default sample count. Per dimension when `per_dim` is set, otherwise
    /// spread round-robin over the dimensions.
    pub samples: usize,
    pub per_dim: bool,
    pub dims: &'static [usize],
    /// Ignores configured dimension overrides.
    pub fixed_dims: bool,
    pub run: RunFn,
}

const fn prop(
    id: &'static str,
    kind: Kind,
    samples: usize,
    per_dim: bool,
    dims: &'static [usize],
    fixed_dims: bool,
    run: RunFn,
) -> PropertyInfo {
    PropertyInfo {
        id,
        kind,
        samples,
        per_dim,
        dims,
        fixed_dims,
        run,
    }
}

use Kind::{Hard, ReportOnly};

const D2_6: &[usize] = &[2, 3, 4, 5, 6];
const D2_5: &[usize] = &[2, 3, 4, 5];
const D2_4: &[usize] = &[2, 3, 4];
const QUBIT: &[usize] = &[2];
const NONE: &[usize] = &[];

pub static REGISTRY: &[PropertyInfo] = &[
    prop("matops.eig.reconstruction", Hard, 100, false, D2_6, false, eig_reconstruction),
    prop("matops.psd_sqrt.square", Hard, 100, false, D2_6, false, psd_sqrt_square),
    prop("matops.norms.ordering", Hard, 100, false, D2_6, false, norm_ordering),
    prop("matops.norms.unitary_invariance", Hard, 100, false, D2_6, false, norm_unitary_invariance),
    prop("states.random_density.valid", Hard, 1000, false, D2_6, false, random_density_valid),
    prop("states.bloch.round_trip", Hard, 200, true, D2_4, false, bloch_round_trip),
    prop("states.purity.pure_iff_unit_eigenvalue", Hard, 200, false, D2_6, false, pure_iff_unit_eigenvalue),
    prop("states.bloch.positivity", Hard, 200, false, &[2, 3], true, bloch_positivity),
    prop("fidelity.G.ge.F", ReportOnly, 500, false, D2_5, false, super_ge_uhlmann),
    prop("fidelity.qubit.G.eq.F", Hard, 500, false, QUBIT, true, qubit_g_eq_f),
    prop("fidelity.C.metric_axioms", Hard, 500, true, D2_4, false, c_metric_axioms),
    prop("fidelity.unitary_invariance", Hard, 200, false, D2_4, false, fidelity_unitary_invariance),
    prop("fidelity.F.cpt_expansive", Hard, 200, false, D2_4, false, f_cpt_expansive),
    prop("metrics.metric_axioms", Hard, 300, true, D2_4, false, metric_axioms),
    prop("metrics.ordering_chain", Hard, 500, true, D2_5, false, ordering_chain),
    prop("metrics.pg.pure_state_maximum", Hard, 200, true, D2_4, false, pg_pure_state_maximum),
    prop("metrics.qubit.Dg.eq.C", Hard, 200, false, QUBIT, true, qubit_g_eq_c),
    prop("metrics.qubit.Dpg.eq.Dtr", Hard, 200, false, QUBIT, true, qubit_pg_eq_trace),
    prop("metrics.pg.joint_convexity", Hard, 200, false, D2_4, false, pg_joint_convexity),
    prop("metrics.Dg2.convexity_first_arg", ReportOnly, 200, false, D2_4, false, g2_convexity_first_arg),
    prop("metrics.Dg2.joint_convexity", ReportOnly, 200, false, D2_4, false, g2_joint_convexity),
    prop("metrics.Dg.oracle_soundness", Hard, 20, true, D2_4, false, g_oracle_soundness),
    prop("channels.pg.contractivity", Hard, 300, false, D2_4, false, pg_contractivity),
    prop("channels.pg.contractivity_search", ReportOnly, 300, false, D2_4, false, pg_contractivity_search),
    prop("channels.F.expansivity", Hard, 300, false, D2_4, false, channel_f_expansivity),
    prop("example2.G.expansivity.violation", Hard, 300, false, D2_4, false, example2_violation),
    prop("channels.Dg.contractivity_search", ReportOnly, 300, false, D2_4, false, g_contractivity_search),
    prop("example1.regression", Hard, 1, false, NONE, true, example1_regression),
];

pub fn find(id: &str) -> Option<&'static PropertyInfo> {
    REGISTRY.iter().find(|p| p.id == id)
}

fn st(rho: &DensityMatrix) -> Value {
    serde_json::to_value(StateFile::from_state(rho)).expect("plain data serializes")
}

fn mat(m: &ComplexMatrix) -> Value {
    serde_json::to_value(crate::io::encode_matrix(m.as_inner())).expect("plain data serializes")
}

fn chan(phi: &KrausChannel) -> Value {
    serde_json::to_value(ChannelFile::from_channel(phi)).expect("plain data serializes")
}

fn sample_state(rng: &mut SeededRng, dim: usize) -> Result<DensityMatrix> {
    let rank = rng.random_range(1..=dim);
    random_density_with(rng, dim, rank)
}

fn sample_hermitian(rng: &mut SeededRng, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim, dim);
    ComplexMatrix::from_inner((&g + g.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Dimensions for each sample: every dimension `samples` times when the
/// budget is per dimension, otherwise round-robin.
fn schedule(ctx: &Ctx) -> Vec<usize> {
    if ctx.per_dim {
        ctx.dims
            .iter()
            .flat_map(|&d| std::iter::repeat_n(d, ctx.samples))
            .collect()
    } else {
        (0..ctx.samples).map(|i| ctx.dims[i % ctx.dims.len()]).collect()
    }
}

// matops

fn eig_reconstruction(ctx: &mut Ctx) -> Result<()> {
    for dim in schedule(ctx) {
        let m = sample_hermitian(&mut ctx.rng, dim);
        let eig = hermitian_eig(&m)?;
        let scale = m.frobenius_norm().max(1.0);
        let residual = (&eig.reconstruct() - &m).frobenius_norm() / scale;
        let orth = eig.orthonormality_residual();
        let order = eig
            .eigenvalues
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(0.0, f64::min);
        ctx.tally.case();
        let payload = || json!({ "matrix": mat(&m) });
        ctx.tally.record("reconstruction", 1e-9, -residual, payload);
        ctx.tally.record("orthonormality", 1e-10, -orth, payload);
        ctx.tally.record("descending", 0.0, order, payload);
    }
    Ok(())
}

fn psd_sqrt_square(ctx: &mut Ctx) -> Result<()> {
    for dim in schedule(ctx) {
        let rank = ctx.rng.random_range(1..=dim);
        let g = ginibre(&mut ctx.rng, dim, rank);
        let m = ComplexMatrix::from_inner(&g * g.adjoint());
        let s = psd_sqrt(&m)?;
        let residual = (&(&s * &s) - &m).frobenius_norm() / m.frobenius_norm().max(1.0);
        ctx.tally.case();
        ctx.tally
            .record("square", 1e-8, -residual, || json!({ "matrix": mat(&m) }));
    }
    Ok(())
}

fn norm_ordering(ctx: &mut Ctx) -> Result<()> {
    for dim in schedule(ctx) {
        let m = sample_hermitian(&mut ctx.rng, dim);
        let tn = trace_norm(&m)?;
        let sn = spectral_norm(&m)?;
        ctx.tally.case();
        let payload = || json!({ "matrix": mat(&m) });
        ctx.tally.record("trace_ge_spectral", 1e-12, (tn - sn) / tn.max(1.0), payload);
        ctx.tally.record("spectral_nonnegative", 0.0, sn, payload);

        let v = ginibre(&mut ctx.rng, dim, 1);
        let weight: f64 = ctx.rng.random_range(-3.0..3.0);
        let r1 = ComplexMatrix::from_inner(&v * v.adjoint() * Complex64::new(weight, 0.0));
        let tn = trace_norm(&r1)?;
        let sn = spectral_norm(&r1)?;
        ctx.tally.record("rank_one_equality", 1e-12, -(tn - sn).abs() / tn.max(1.0), || {
            json!({ "matrix": mat(&r1) })
        });
    }
    Ok(())
}

fn norm_unitary_invariance(ctx: &mut Ctx) -> Result<()> {
    for dim in schedule(ctx) {
        let m = sample_hermitian(&mut ctx.rng, dim);
        let u = haar_unitary(&mut ctx.rng, dim);
        let rotated = m.conjugate_by(&u);
        let dt = (trace_norm(&m)? - trace_norm(&rotated)?).abs();
        let ds = (spectral_norm(&m)? - spectral_norm(&rotated)?).abs();
        ctx.tally.case();
        ctx.tally.record("invariance", 1e-9, -dt.max(ds), || {
            json!({ "matrix": mat(&m), "unitary": mat(&u) })
        });
    }
    Ok(())
}

// states

fn random_density_valid(ctx: &mut Ctx) -> Result<()> {
    for dim in schedule(ctx) {
        let rho = sample_state(&mut ctx.rng, dim)?;
        let ok = make_density(rho.matrix().clone()).is_ok();
        ctx.tally.case();
        ctx.tally
            .record("validates", 0.0, if ok { 0.0 } else { -1.0 }, || json!({ "rho": st(&rho) }));
    }
    Ok(())
}

fn bloch_round_trip(ctx: &mut Ctx) -> Result<()> {
    for dim in schedule(ctx) {
        let rho = sample_state(&mut ctx.rng, dim)?;
        let back = bloch_to_density(&density_to_bloch(&rho)?)?;
        let residual = (back.matrix() - rho.matrix()).frobenius_norm();
        ctx.tally.case();
        ctx.tally
            .record("round_trip", 1e-10, -residual, || json!({ "rho": st(&rho) }));
    }
    Ok(())
}

fn pure_iff_unit_eigenvalue(ctx: &mut Ctx) -> Result<()> {
    let mut pure = 0usize;
    for dim in schedule(ctx) {
        let rho = sample_state(&mut ctx.rng, dim)?;
        let is_pure = (rho.purity() - 1.0).abs() <= 1e-9;
        let top = rho.eigenvalues()?[0];
        let unit_top = (top - 1.0).abs() <= 1e-9;
        pure += usize::from(is_pure);
        ctx.tally.case();
        ctx.tally.record(
            "equivalence",
            0.0,
            if is_pure == unit_top { 0.0 } else { -1.0 },
            || json!({ "rho": st(&rho) }),
        );
    }
    ctx.tally.note("pure_samples", json!(pure));
    Ok(())
}

fn bloch_positivity(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.samples {
        let direction: Vec<f64> = (0..3)
            .map(|_| ctx.rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        // every fourth sample sits on the surface
        let radius = if i % 4 == 0 {
            1.0
        } else {
            ctx.rng.random::<f64>().cbrt()
        };
        let coeffs: Vec<f64> = direction.iter().map(|x| x / norm * radius).collect();
        let ok = BlochState::new(2, coeffs.clone()).and_then(|b| bloch_to_density(&b)).is_ok();
        ctx.tally.case();
        ctx.tally.record("qubit_ball", 0.0, if ok { 0.0 } else { -1.0 }, || {
            json!({ "dim": 2, "bloch": coeffs })
        });
    }

    let mut outside = Vec::new();
    for k in 0..8 {
        let mut coeffs = vec![0.0; 8];
        coeffs[k] = 1.0;
        if let Err(Error::NotPositive { .. }) = bloch_to_density(&BlochState::new(3, coeffs)?) {
            outside.push(k);
        }
    }
    ctx.tally.case();
    ctx.tally.note("qutrit_directions_outside", json!(outside));
    ctx.tally.record(
        "qutrit_direction_outside",
        0.0,
        if outside.is_empty() { -1.0 } else { 0.0 },
        || json!({ "dim": 3, "generator_directions": "all 8 convert" }),
    );
    Ok(())
}

// fidelity

fn super_ge_uhlmann(ctx: &mut Ctx) -> Result<()> {
    for dim in schedule(ctx) {
        let a = sample_state(&mut ctx.rng, dim)?;
        let b = sample_state(&mut ctx.rng, dim)?;
        let slack = super_fidelity(&a, &b)? - uhlmann_fidelity(&a, &b)?;
        ctx.tally.case();
        ctx.tally
            .record("G_ge_F", 1e-8, slack, || json!({ "rho": st(&a), "sigma": st(&b) }));
    }
    Ok(())
}

fn qubit_g_eq_f(ctx: &mut Ctx) -> Result<()> {
    for _ in 0..ctx.samples {
        let a = sample_state(&mut ctx.rng, 2)?;
        let b = sample_state(&mut ctx.rng, 2)?;
        let gap = (super_fidelity(&a, &b)? - uhlmann_fidelity(&a, &b)?).abs();
        ctx.tally.case();
        ctx.tally
            .record("G_eq_F", 1e-8, -gap, || json!({ "rho": st(&a), "sigma": st(&b) }));
    }
    Ok(())
}

fn c_metric_axioms(ctx: &mut Ctx) -> Result<()> {
    for dim in schedule(ctx) {
        let a = sample_state(&mut ctx.rng, dim)?;
        let b = sample_state(&mut ctx.rng, dim)?;
        let c = sample_state(&mut ctx.rng, dim)?;
        let ab = metric_c(&a, &b)?;
        let payload = || json!({ "a": st(&a), "b": st(&b), "c": st(&c) });
        ctx.tally.case();
        ctx.tally.record("nonnegativity", 0.0, ab, payload);
        ctx.tally
            .record("symmetry", 1e-9, -(ab - metric_c(&b, &a)?).abs(), payload);
        // C(ρ,ρ) is the square root of a rounding-level quantity
        ctx.tally.record("identity", 1e-7, -metric_c(&a, &a)?, payload);
        let slack = metric_c(&a, &c)? + metric_c(&c, &b)? - ab;
        ctx.tally.record("triangle", 1e-9, slack, payload);
    }
    Ok(())
}

fn fidelity_unitary_invariance(ctx: &mut Ctx) -> Result<()> {
    for dim in schedule(ctx) {
        let a = sample_state(&mut ctx.rng, dim)?;
        let b = sample_state(&mut ctx.rng, dim)?;
        let u = haar_unitary(&mut ctx.rng, dim);
        let (ua, ub) = (a.conjugate_by(&u), b.conjugate_by(&u));
        let df = (uhlmann_fidelity(&a, &b)? - uhlmann_fidelity(&ua, &ub)?).abs();
        let dg = (super_fidelity(&a, &b)? - super_fidelity(&ua, &ub)?).abs();
        let payload = || json!({ "rho": st(&a), "sigma": st(&b), "unitary": mat(&u) });
        ctx.tally.case();
        ctx.tally.record("F_invariance", 1e-9, -df, payload);
        ctx.tally.record("G_invariance", 1e-9, -dg, payload);
    }
    Ok(())
}

fn f_cpt_expansive(ctx: &mut Ctx) -> Result<()> {
    let dims = ctx.dims.clone();
    for i in 0..ctx.samples {
        let draw = square_draw(&mut ctx.rng, &dims, i)?;
        let slack = uhlmann_fidelity(&draw.out_rho, &draw.out_sigma)?
            - uhlmann_fidelity(&draw.rho, &draw.sigma)?;
        ctx.tally.case();
        ctx.tally.record("expansive", 1e-8, slack, || draw.payload());
    }
    Ok(())
}

// metrics

fn metric_axioms(ctx: &mut Ctx) -> Result<()> {
    let opts = *ctx.optimizer;
    let g = |x: &DensityMatrix, y: &DensityMatrix| g_metric(x, y, &opts).map(|r| r.value);
    let pg = |x: &DensityMatrix, y: &DensityMatrix| pg_metric(x, y).map(|r| r.value);
    for dim in schedule(ctx) {
        let a = sample_state(&mut ctx.rng, dim)?;
        let b = sample_state(&mut ctx.rng, dim)?;
        let c = sample_state(&mut ctx.rng, dim)?;
        let payload = || json!({ "a": st(&a), "b": st(&b), "c": st(&c) });
        ctx.tally.case();

        let ab = pg(&a, &b)?;
        ctx.tally.record("pg.nonnegativity", 0.0, ab, payload);
        ctx.tally.record("pg.symmetry", 1e-9, -(ab - pg(&b, &a)?).abs(), payload);
        ctx.tally.record("pg.identity", 1e-9, -pg(&a, &a)?, payload);
        ctx.tally
            .record("pg.triangle", 1e-8, pg(&a, &c)? + pg(&c, &b)? - ab, payload);

        let ab = g(&a, &b)?;
        ctx.tally.record("g.nonnegativity", 0.0, ab, payload);
        ctx.tally
            .record("g.symmetry", 2.0 * opts.tolerance, -(ab - g(&b, &a)?).abs(), payload);
        ctx.tally.record("g.identity", 1e-9, -g(&a, &a)?, payload);
        ctx.tally
            .record("g.triangle", 1e-5, g(&a, &c)? + g(&c, &b)? - ab, payload);
    }
    Ok(())
}

fn ordering_chain(ctx: &mut Ctx) -> Result<()> {
    let opts = *ctx.optimizer;
    for dim in schedule(ctx) {
        let a = sample_state(&mut ctx.rng, dim)?;
        let b = sample_state(&mut ctx.rng, dim)?;
        let g = g_metric(&a, &b, &opts)?.value;
        let pg = pg_metric(&a, &b)?.value;
        let bound = g_metric_bound(&a, &b)?;
        let payload = || json!({ "rho": st(&a), "sigma": st(&b) });
        ctx.tally.case();
        ctx.tally.record("g_ge_pg", 1e-9, g - pg, payload);
        ctx.tally.record("g_le_bound", 1e-9, bound - g, payload);
        if dim == 2 {
            ctx.tally
                .record("qubit_bound_equality", 1e-6, -(g - bound).abs(), payload);
        }
    }
    Ok(())
}

/// `⟨v|Δ|v⟩ / ⟨v|v⟩`, which equals `G(ρ,τ) − G(σ,τ)` for the pure state
/// `τ = |v⟩⟨v|` (the entropy term of `G` vanishes for pure `τ`).
fn rayleigh(delta: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> f64 {
    let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    (v.adjoint() * delta * v)[(0, 0)].re / norm_sqr
}

/// Best pure states among `count` Haar-random ones: the largest value of
/// `⟨v|Δ|v⟩` and of `−⟨v|Δ|v⟩`, with the vectors attaining them.
fn sampled_pure_maximum(
    rng: &mut SeededRng,
    delta: &DMatrix<Complex64>,
    count: usize,
) -> [(f64, DMatrix<Complex64>); 2] {
    let dim = delta.nrows();
    let start = ginibre(rng, dim, 1);
    let mut best = [(f64::NEG_INFINITY, start.clone()), (f64::NEG_INFINITY, start)];
    for _ in 0..count {
        let v = ginibre(rng, dim, 1);
        let form = rayleigh(delta, &v);
        for (slot, value) in best.iter_mut().zip([form, -form]) {
            if value > slot.0 {
                *slot = (value, v.clone());
            }
        }
    }
    best
}

/// Ascends `⟨v|sΔ|v⟩` over unit vectors from `v` by shifted power
/// iteration; every iterate is a pure state and the value never decreases.
fn refine_pure(delta: &DMatrix<Complex64>, sign: f64, mut v: DMatrix<Complex64>) -> f64 {
    let dim = delta.nrows();
    let shift = delta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let shifted = delta * Complex64::new(sign, 0.0)
        + DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(shift, 0.0);
    let mut value = sign * rayleigh(delta, &v);
    for _ in 0..PURE_STATE_REFINEMENT {
        let next = &shifted * &v;
        let norm = next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        v = next / Complex64::new(norm, 0.0);
        value = value.max(sign * rayleigh(delta, &v));
    }
    value
}

fn pg_pure_state_maximum(ctx: &mut Ctx) -> Result<()> {
    let mut raw_shortfall: f64 = 0.0;
    for dim in schedule(ctx) {
        let a = sample_state(&mut ctx.rng, dim)?;
        let b = sample_state(&mut ctx.rng, dim)?;
        let pg = pg_metric(&a, &b)?.value;
        let exact = spectral_distance(&a, &b)?;
        let delta = (a.matrix() - b.matrix()).into_inner();
        let [forward, backward] = sampled_pure_maximum(&mut ctx.rng, &delta, PURE_STATE_SAMPLES);
        let sampled = forward.0.max(backward.0);
        let refined = refine_pure(&delta, 1.0, forward.1).max(refine_pure(&delta, -1.0, backward.1));
        raw_shortfall = raw_shortfall.max(pg - sampled);
        let payload = || json!({ "rho": st(&a), "sigma": st(&b) });
        ctx.tally.case();
        ctx.tally.record("equals_spectral_norm", 0.0, -(pg - exact).abs(), payload);
        ctx.tally.record("sampled_not_above", 1e-9, pg - sampled, payload);
        ctx.tally.record("refined_not_above", 1e-9, pg - refined, payload);
        ctx.tally.record("refined_close_below", 1e-2, refined - pg, payload);
    }
    ctx.tally.note("largest_raw_sample_shortfall", json!(raw_shortfall));
    Ok(())
}

fn qubit_g_eq_c(ctx: &mut Ctx) -> Result<()> {
    let opts = *ctx.optimizer;
    for _ in 0..ctx.samples {
        let a = sample_state(&mut ctx.rng, 2)?;
        let b = sample_state(&mut ctx.rng, 2)?;
        let gap = (g_metric(&a, &b, &opts)?.value - metric_c(&a, &b)?).abs();
        ctx.tally.case();
        ctx.tally
            .record("Dg_eq_C", 1e-6, -gap, || json!({ "rho": st(&a), "sigma": st(&b) }));
    }
    Ok(())
}

fn qubit_pg_eq_trace(ctx: &mut Ctx) -> Result<()> {
    for _ in 0..ctx.samples {
        let a = sample_state(&mut ctx.rng, 2)?;
        let b = sample_state(&mut ctx.rng, 2)?;
        let gap = (pg_metric(&a, &b)?.value - trace_metric(&a, &b)?).abs();
        ctx.tally.case();
        ctx.tally
            .record("Dpg_eq_Dtr", 1e-9, -gap, || json!({ "rho": st(&a), "sigma": st(&b) }));
    }
    Ok(())
}

struct MixtureDraw {
    weights: Vec<f64>,
    rhos: Vec<DensityMatrix>,
    sigmas: Vec<DensityMatrix>,
}

impl MixtureDraw {
    fn sample(rng: &mut SeededRng, dim: usize) -> Result<Self> {
        let k = rng.random_range(2..=4);
        let weights = dirichlet_uniform(rng, k);
        let rhos = (0..k).map(|_| sample_state(rng, dim)).collect::<Result<Vec<_>>>()?;
        let sigmas = (0..k).map(|_| sample_state(rng, dim)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            weights,
            rhos,
            sigmas,
        })
    }

    fn payload(&self) -> Value {
        json!({
            "weights": self.weights,
            "rhos": self.rhos.iter().map(st).collect::<Vec<_>>(),
            "sigmas": self.sigmas.iter().map(st).collect::<Vec<_>>(),
        })
    }
}

fn pg_joint_convexity(ctx: &mut Ctx) -> Result<()> {
    for dim in schedule(ctx) {
        let draw = MixtureDraw::sample(&mut ctx.rng, dim)?;
        let rho = DensityMatrix::mixture(&draw.weights, &draw.rhos)?;
        let sigma = DensityMatrix::mixture(&draw.weights, &draw.sigmas)?;
        let mut rhs = 0.0;
        for ((w, r), s) in draw.weights.iter().zip(&draw.rhos).zip(&draw.sigmas) {
            rhs += w * pg_metric(r, s)?.value;
        }
        let slack = rhs - pg_metric(&rho, &sigma)?.value;
        ctx.tally.case();
        ctx.tally.record("joint_convexity", 1e-9, slack, || draw.payload());
    }
    Ok(())
}

fn g2_convexity_first_arg(ctx: &mut Ctx) -> Result<()> {
    let opts = *ctx.optimizer;
    let g2 = |x: &DensityMatrix, y: &DensityMatrix| g_metric(x, y, &opts).map(|r| r.value.powi(2));
    for dim in schedule(ctx) {
        let r1 = sample_state(&mut ctx.rng, dim)?;
        let r2 = sample_state(&mut ctx.rng, dim)?;
        let s = sample_state(&mut ctx.rng, dim)?;
        let (d1, d2) = (g2(&r1, &s)?, g2(&r2, &s)?);
        ctx.tally.case();
        for lambda in LAMBDAS {
            let mix = DensityMatrix::mixture(&[lambda, 1.0 - lambda], &[r1.clone(), r2.clone()])?;
            let slack = lambda * d1 + (1.0 - lambda) * d2 - g2(&mix, &s)?;
            ctx.tally.record("convexity", 1e-4, slack, || {
                json!({ "lambda": lambda, "rho1": st(&r1), "rho2": st(&r2), "sigma": st(&s) })
            });
        }
    }
    Ok(())
}

fn g2_joint_convexity(ctx: &mut Ctx) -> Result<()> {
    let opts = *ctx.optimizer;
    let g2 = |x: &DensityMatrix, y: &DensityMatrix| g_metric(x, y, &opts).map(|r| r.value.powi(2));
    for dim in schedule(ctx) {
        let r1 = sample_state(&mut ctx.rng, dim)?;
        let r2 = sample_state(&mut ctx.rng, dim)?;
        let s1 = sample_state(&mut ctx.rng, dim)?;
        let s2 = sample_state(&mut ctx.rng, dim)?;
        let (d1, d2) = (g2(&r1, &s1)?, g2(&r2, &s2)?);
        ctx.tally.case();
        for lambda in LAMBDAS {
            let w = [lambda, 1.0 - lambda];
            let rho = DensityMatrix::mixture(&w, &[r1.clone(), r2.clone()])?;
            let sigma = DensityMatrix::mixture(&w, &[s1.clone(), s2.clone()])?;
            let slack = lambda * d1 + (1.0 - lambda) * d2 - g2(&rho, &sigma)?;
            ctx.tally.record("joint_convexity", 1e-4, slack, || {
                json!({
                    "lambda": lambda,
                    "rho1": st(&r1), "rho2": st(&r2),
                    "sigma1": st(&s1), "sigma2": st(&s2),
                })
            });
        }
    }
    Ok(())
}

fn g_oracle_soundness(ctx: &mut Ctx) -> Result<()> {
    let opts = *ctx.optimizer;
    let mut pairs = vec![example1_pair(), example2_pair()];
    for dim in schedule(ctx) {
        pairs.push((sample_state(&mut ctx.rng, dim)?, sample_state(&mut ctx.rng, dim)?));
    }
    for (a, b) in &pairs {
        let g = g_metric(a, b, &opts)?.value;
        let oracle = g_metric_oracle(a, b, ORACLE_SAMPLES, ctx.rng.random())?;
        ctx.tally.case();
        ctx.tally
            .record("g_ge_oracle", 1e-6, g - oracle, || json!({ "rho": st(a), "sigma": st(b) }));
    }
    Ok(())
}

// channels

/// A random channel with a random input pair and both images.
pub struct Draw {
    pub phi: KrausChannel,
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
    pub out_rho: DensityMatrix,
    pub out_sigma: DensityMatrix,
}

impl Draw {
    fn sample(rng: &mut SeededRng, in_dim: usize, out_dim: usize, kraus: usize) -> Result<Self> {
        let phi = random_channel_with(rng, in_dim, out_dim, kraus)?;
        let rho = sample_state(rng, in_dim)?;
        let sigma = sample_state(rng, in_dim)?;
        let out_rho = phi.apply(&rho)?;
        let out_sigma = phi.apply(&sigma)?;
        Ok(Self {
            phi,
            rho,
            sigma,
            out_rho,
            out_sigma,
        })
    }

    fn payload(&self) -> Value {
        json!({ "channel": chan(&self.phi), "rho": st(&self.rho), "sigma": st(&self.sigma) })
    }
}

/// A square channel (`out_dim = in_dim`) with the dimension cycling through
/// `dims` and 1–4 Kraus operators.
fn square_draw(rng: &mut SeededRng, dims: &[usize], index: usize) -> Result<Draw> {
    let dim = dims[index % dims.len()];
    let kraus = rng.random_range(1..=4);
    Draw::sample(rng, dim, dim, kraus)
}

/// The shared square-channel draws for a master seed.
pub fn channel_draws(master_seed: u64, count: usize, dims: &[usize]) -> Result<Vec<Draw>> {
    let mut rng = rng_from_seed(derive_seed(master_seed, CHANNEL_DRAWS));
    (0..count).map(|i| square_draw(&mut rng, dims, i)).collect()
}

/// `D_PG` before and after the 4-level example channel, which is not unital.
fn example2_pg() -> Result<(f64, f64)> {
    let (rho, sigma) = example2_pair();
    let phi = example2_channel();
    Ok((
        pg_metric(&rho, &sigma)?.value,
        pg_metric(&phi.apply(&rho)?, &phi.apply(&sigma)?)?.value,
    ))
}

fn pg_contractivity(ctx: &mut Ctx) -> Result<()> {
    for draw in channel_draws(ctx.master_seed, ctx.samples, &ctx.dims)? {
        let slack = pg_metric(&draw.rho, &draw.sigma)?.value
            - pg_metric(&draw.out_rho, &draw.out_sigma)?.value;
        ctx.tally.case();
        ctx.tally.record("contraction", 1e-9, slack, || draw.payload());
    }
    let (before, after) = example2_pg()?;
    ctx.tally.note("example2_channel", json!({ "Dpg_before": before, "Dpg_after": after }));
    Ok(())
}

/// Looks for `D_PG` increases among compressing channels (output dimension
/// below the input one) with the fewest Kraus operators that fit, which is
/// where they occur. The 4-level example channel is the first case.
fn pg_contractivity_search(ctx: &mut Ctx) -> Result<()> {
    let (rho, sigma) = example2_pair();
    let phi = example2_channel();
    let slack = pg_metric(&rho, &sigma)?.value
        - pg_metric(&phi.apply(&rho)?, &phi.apply(&sigma)?)?.value;
    ctx.tally.case();
    ctx.tally.record("example2_channel", 1e-9, slack, || {
        json!({ "channel": chan(&phi), "rho": st(&rho), "sigma": st(&sigma) })
    });

    let pairs: Vec<(usize, usize)> = ctx
        .dims
        .iter()
        .flat_map(|&i| ctx.dims.iter().filter(move |&&o| o < i).map(move |&o| (i, o)))
        .collect();
    let mut violations = 0usize;
    for k in 0..ctx.samples {
        let Some(&(in_dim, out_dim)) = pairs.get(k % pairs.len().max(1)) else {
            break;
        };
        let draw = Draw::sample(&mut ctx.rng, in_dim, out_dim, in_dim.div_ceil(out_dim))?;
        let slack = pg_metric(&draw.rho, &draw.sigma)?.value
            - pg_metric(&draw.out_rho, &draw.out_sigma)?.value;
        violations += usize::from(slack < -1e-9);
        ctx.tally.case();
        ctx.tally.record("random_compressing", 1e-9, slack, || draw.payload());
    }
    ctx.tally.note("random_violations", json!(violations));
    Ok(())
}

fn channel_f_expansivity(ctx: &mut Ctx) -> Result<()> {
    for draw in channel_draws(ctx.master_seed, ctx.samples, &ctx.dims)? {
        let slack = uhlmann_fidelity(&draw.out_rho, &draw.out_sigma)?
            - uhlmann_fidelity(&draw.rho, &draw.sigma)?;
        ctx.tally.case();
        ctx.tally.record("expansion", 1e-8, slack, || draw.payload());
    }
    Ok(())
}

fn example2_violation(ctx: &mut Ctx) -> Result<()> {
    let (rho, sigma) = example2_pair();
    let phi = example2_channel();
    let (out_rho, out_sigma) = (phi.apply(&rho)?, phi.apply(&sigma)?);
    let before = super_fidelity(&rho, &sigma)?;
    let after = super_fidelity(&out_rho, &out_sigma)?;
    let c_before = metric_c(&rho, &sigma)?;
    let c_after = metric_c(&out_rho, &out_sigma)?;
    let payload = || json!({ "channel": chan(&phi), "rho": st(&rho), "sigma": st(&sigma) });
    ctx.tally.case();
    ctx.tally.record("G_before", 1e-12, -(before - 0.5).abs(), payload);
    ctx.tally.record("G_after", 1e-12, -after.abs(), payload);
    ctx.tally
        .record("G_decreases", 0.0, if after < before { 0.0 } else { -1.0 }, payload);
    ctx.tally
        .record("C_increases", 0.0, if c_after > c_before { 0.0 } else { -1.0 }, payload);
    ctx.tally.note(
        "example",
        json!({ "G_before": before, "G_after": after, "C_before": c_before, "C_after": c_after }),
    );

    let mut violations = 0usize;
    let mut largest_drop: f64 = 0.0;
    let mut witness = Value::Null;
    let draws = channel_draws(ctx.master_seed, ctx.samples, &ctx.dims)?;
    for draw in &draws {
        let drop = super_fidelity(&draw.rho, &draw.sigma)?
            - super_fidelity(&draw.out_rho, &draw.out_sigma)?;
        if drop > 1e-12 {
            violations += 1;
        }
        if drop > largest_drop {
            largest_drop = drop;
            witness = draw.payload();
        }
    }
    ctx.tally.note(
        "random_draws",
        json!({ "draws": draws.len(), "violations": violations, "largest_drop": largest_drop, "witness": witness }),
    );
    Ok(())
}

fn g_contractivity_search(ctx: &mut Ctx) -> Result<()> {
    let opts = *ctx.optimizer;
    let mut noisy = 0usize;
    for draw in channel_draws(ctx.master_seed, ctx.samples, &ctx.dims)? {
        let increase = g_metric(&draw.out_rho, &draw.out_sigma, &opts)?.value
            - g_metric(&draw.rho, &draw.sigma, &opts)?.value;
        if increase > 1e-5 {
            noisy += 1;
        }
        ctx.tally.case();
        ctx.tally.record("contraction", 1e-5, -increase, || draw.payload());
    }
    ctx.tally.note("increases_above_1e-5", json!(noisy));
    Ok(())
}

fn example1_regression(ctx: &mut Ctx) -> Result<()> {
    let (rho, sigma) = example1_pair();
    let g = g_metric(&rho, &sigma, ctx.optimizer)?.value;
    let pg = pg_metric(&rho, &sigma)?.value;
    let f = uhlmann_fidelity(&rho, &sigma)?;
    let bound = g_metric_bound(&rho, &sigma)?;
    let payload = || json!({ "rho": st(&rho), "sigma": st(&sigma) });
    ctx.tally.case();
    ctx.tally.record("Dg", 1e-6, -(g - 0.5).abs(), payload);
    ctx.tally.record("Dpg", 1e-9, -(pg - 0.5).abs(), payload);
    ctx.tally.record("F", 1e-9, -(f - 0.75).abs(), payload);
    ctx.tally
        .record("bound", 1e-12, -(bound - 0.375f64.sqrt()).abs(), payload);
    ctx.tally.record("strict_gap", 0.0, bound - g - 0.11, payload);
    ctx.tally.note(
        "values",
        json!({ "Dg": g, "Dpg": pg, "F": f, "bound": bound, "gap": bound - g }),
    );
    Ok(())
}
