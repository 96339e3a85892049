//! Projected gradient ascent over the probability simplex.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::random::{dirichlet_uniform, rng_from_seed};

const GAIN_TOL: f64 = 1e-12;
const INITIAL_STEP: f64 = 1.0;
const MAX_STEP: f64 = 1e6;
const MIN_STEP: f64 = 1e-30;
const ARMIJO: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    /// Largest acceptable objective residual for the reported maximum.
    pub tolerance: f64,
    /// Random Dirichlet starting points, on top of the uniform point and the
    /// vertices.
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            restarts: 16,
            max_iterations: 10_000,
            seed: 0,
        }
    }
}

/// Euclidean projection onto `{t : tᵢ ≥ 0, Σtᵢ = 1}` by the sort-and-threshold
/// rule.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        cumulative += x;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if x - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// A smooth objective on the simplex.
pub trait SimplexObjective {
    fn value(&self, t: &[f64]) -> f64;
    fn gradient(&self, t: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone)]
pub struct AscentResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Objective gain of the last accepted step (zero when the iterate is
    /// stationary).
    pub last_gain: f64,
    /// Index of the starting point that produced this result.
    pub start: usize,
}

/// Runs ascent from one starting point.
///
/// Each iteration backtracks from `max(1, 2·previous step)` until the
/// projected step satisfies the sufficient-increase condition
/// `f(t') ≥ f(t) + ½⟨∇f(t), t' − t⟩`. The run stops when the accepted gain
/// drops below `1e-12`, when no step down to `1e-30` moves the iterate, or at
/// the iteration cap.
pub fn ascend<O: SimplexObjective>(objective: &O, start: Vec<f64>, max_iterations: usize) -> AscentResult {
    let mut t = project_to_simplex(&start);
    let mut value = objective.value(&t);
    let mut grad = vec![0.0; t.len()];
    let mut trial = vec![0.0; t.len()];
    let mut accepted_step = INITIAL_STEP;
    let mut last_gain = 0.0;
    let mut iterations = 0;

    'outer: while iterations < max_iterations {
        iterations += 1;
        objective.gradient(&t, &mut grad);
        let mut step = (2.0 * accepted_step).clamp(INITIAL_STEP, MAX_STEP);
        let (candidate, candidate_value) = loop {
            for ((x, &ti), &gi) in trial.iter_mut().zip(&t).zip(&grad) {
                *x = ti + step * gi;
            }
            let candidate = project_to_simplex(&trial);
            if candidate != t {
                let candidate_value = objective.value(&candidate);
                let predicted: f64 = grad
                    .iter()
                    .zip(candidate.iter().zip(&t))
                    .map(|(g, (c, x))| g * (c - x))
                    .sum();
                if candidate_value > value
                    && candidate_value - value >= ARMIJO * predicted
                {
                    break (candidate, candidate_value);
                }
            }
            // a long step can project back onto the current point even when a
            // short one would move, so only a vanishing step means stationary
            step *= 0.5;
            if step < MIN_STEP {
                last_gain = 0.0;
                break 'outer;
            }
        };
        accepted_step = step;
        last_gain = candidate_value - value;
        t = candidate;
        value = candidate_value;
        if last_gain < GAIN_TOL {
            break;
        }
    }

    AscentResult {
        point: t,
        value,
        iterations,
        last_gain,
        start: 0,
    }
}

/// Starting points: the uniform point, every vertex, then `restarts` random
/// Dirichlet points.
pub fn starting_points(size: usize, restarts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut points = Vec::with_capacity(1 + size + restarts);
    points.push(vec![1.0 / size as f64; size]);
    for k in 0..size {
        let mut vertex = vec![0.0; size];
        vertex[k] = 1.0;
        points.push(vertex);
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..restarts {
        // draw a fresh u64 first so each point's stream is independent of size
        let sub: u64 = rng.random();
        points.push(dirichlet_uniform(&mut rng_from_seed(sub), size));
    }
    points
}

/// Best ascent over all starting points; ties go to the lower start index.
pub fn maximize<O: SimplexObjective>(objective: &O, size: usize, opts: &OptimizerOptions) -> AscentResult {
    let mut best: Option<AscentResult> = None;
    for (index, start) in starting_points(size, opts.restarts, opts.seed).into_iter().enumerate() {
        let mut result = ascend(objective, start, opts.max_iterations);
        result.start = index;
        if best.as_ref().is_none_or(|b| result.value > b.value) {
            best = Some(result);
        }
    }
    best.expect("at least the uniform starting point")
}
