//! Reproducible noisy-differentiation experiments on two test functions.
//!
//! Example 1: `y = sin(πt/4) / (t³ + 1)` on `[0, 3]`.
//! Example 2: `y = cos(πt/8) exp(−t²)` on `[0, 5]`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, Uniform};
use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::grid::GridFunction;
use crate::par::{self, Execution};
use crate::regularization::{coordinate_alpha, CoordinationRule};
use crate::stable_diff::{regularized_derivative, BaselineChoice};

pub const DEFAULT_GRID_POINTS: usize = 512;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Example {
    One,
    Two,
}

impl TryFrom<u32> for Example {
    type Error = Error;

    fn try_from(id: u32) -> Result<Self> {
        match id {
            1 => Ok(Example::One),
            2 => Ok(Example::Two),
            other => Err(Error::UnknownExample(other)),
        }
    }
}

impl Example {
    pub fn id(self) -> u32 {
        match self {
            Example::One => 1,
            Example::Two => 2,
        }
    }

    pub fn interval(self) -> (f64, f64) {
        match self {
            Example::One => (0.0, 3.0),
            Example::Two => (0.0, 5.0),
        }
    }

    /// `(y(t), y′(t))`
    pub fn eval(self, t: f64) -> (f64, f64) {
        match self {
            Example::One => {
                let p = t.powi(3) + 1.0;
                let (s, c) = (PI * t / 4.0).sin_cos();
                (s / p, -3.0 * t * t / (p * p) * s + PI / (4.0 * p) * c)
            }
            Example::Two => {
                let e = (-t * t).exp();
                let (s, c) = (PI * t / 8.0).sin_cos();
                (c * e, -e * (PI / 8.0 * s + 2.0 * t * c))
            }
        }
    }
}

pub fn example_function(id: u32, t: f64) -> Result<(f64, f64)> {
    Ok(Example::try_from(id)?.eval(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum NoiseDistribution {
    /// Standard normal.
    #[default]
    GaussianUnit,
    /// Uniform on `[−√3, √3]` (zero mean, unit variance).
    UniformUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub delta: f64,
    pub seed: u64,
    pub distribution: NoiseDistribution,
}

impl NoiseSpec {
    pub fn gaussian(delta: f64, seed: u64) -> Self {
        Self { delta, seed, distribution: NoiseDistribution::GaussianUnit }
    }
}

/// `n` draws of zero-mean, unit-variance noise; a pure function of `(seed, n, distribution)`.
pub fn unit_noise(n: usize, seed: u64, distribution: NoiseDistribution) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match distribution {
        NoiseDistribution::GaussianUnit => (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
        NoiseDistribution::UniformUnit => {
            let r = 3f64.sqrt();
            let u = Uniform::new_inclusive(-r, r).expect("finite bounds");
            (0..n).map(|_| rng.sample(u)).collect()
        }
    }
}

/// `ỹ_i = y_i + δ R_i`.
pub fn add_noise(y: &GridFunction, spec: &NoiseSpec) -> Result<GridFunction> {
    if !(spec.delta >= 0.0 && spec.delta.is_finite()) {
        return Err(Error::InvalidInput(format!("noise level must be >= 0, got {}", spec.delta)));
    }
    if spec.delta == 0.0 {
        return Ok(y.clone());
    }
    let r = unit_noise(y.len(), spec.seed, spec.distribution);
    y.with_values(y.values().iter().zip(r).map(|(v, r)| v + spec.delta * r).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentParams {
    pub example: Example,
    pub delta: f64,
    pub seed: u64,
    pub n: usize,
    /// Defaults to `√δ`.
    pub alpha: Option<f64>,
    pub distribution: NoiseDistribution,
}

impl ExperimentParams {
    pub fn new(example: Example, delta: f64, seed: u64) -> Self {
        Self {
            example,
            delta,
            seed,
            n: DEFAULT_GRID_POINTS,
            alpha: None,
            distribution: NoiseDistribution::GaussianUnit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub example_id: u32,
    pub n: usize,
    pub delta: f64,
    pub alpha: f64,
    pub seed: u64,
    pub max_error_full: f64,
    /// Over `t > a + 3α`; NaN when that region is empty.
    pub max_error_interior: f64,
    pub noisy: GridFunction,
    pub x_alpha: GridFunction,
    pub derivative: GridFunction,
    pub exact_derivative: GridFunction,
    pub warnings: Vec<Warning>,
}

pub fn run_experiment(params: &ExperimentParams) -> Result<ExperimentReport> {
    let ExperimentParams { example, delta, seed, n, alpha, distribution } = *params;
    if !(delta > 0.0) {
        return Err(Error::DegenerateDelta(delta));
    }
    let alpha = match alpha {
        Some(a) => a,
        None => coordinate_alpha(delta, CoordinationRule::SqrtDelta)?,
    };
    let (a, b) = example.interval();
    let y = GridFunction::from_fn(a, b, n, |t| example.eval(t).0)?;
    let exact = GridFunction::from_fn(a, b, n, |t| example.eval(t).1)?;
    let noisy = add_noise(&y, &NoiseSpec { delta, seed, distribution })?;
    let result = regularized_derivative(&noisy, alpha, BaselineChoice::Auto)?;

    let layer_end = a + result.boundary_layer_width;
    let (mut full, mut interior) = (0.0_f64, f64::NAN);
    for ((t, d), e) in exact.times().zip(result.derivative.values()).zip(exact.values()) {
        let err = (d - e).abs();
        full = full.max(err);
        if t > layer_end {
            interior = if interior.is_nan() { err } else { interior.max(err) };
        }
    }
    Ok(ExperimentReport {
        example_id: example.id(),
        n,
        delta,
        alpha,
        seed,
        max_error_full: full,
        max_error_interior: interior,
        noisy,
        x_alpha: result.x_alpha,
        derivative: result.derivative,
        exact_derivative: exact,
        warnings: result.warnings,
    })
}

/// Every `(delta, seed)` pair, delta-major, in input order.
pub fn run_all(
    example: Example,
    deltas: &[f64],
    seeds: &[u64],
    n: usize,
    exec: Execution,
) -> Result<Vec<ExperimentReport>> {
    if deltas.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidInput("need at least one delta and one seed".into()));
    }
    let jobs: Vec<ExperimentParams> = deltas
        .iter()
        .flat_map(|&delta| seeds.iter().map(move |&seed| ExperimentParams { n, ..ExperimentParams::new(example, delta, seed) }))
        .collect();
    par::map(exec, &jobs, run_experiment).into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub delta: f64,
    pub alpha: f64,
    pub seed_count: usize,
    pub median_max_error_full: f64,
    pub median_max_error_interior: f64,
}

/// Groups reports by δ (in first-appearance order) and takes medians.
pub fn aggregate(reports: &[ExperimentReport]) -> Vec<ConvergenceRow> {
    let mut deltas: Vec<f64> = Vec::new();
    for r in reports {
        if !deltas.contains(&r.delta) {
            deltas.push(r.delta);
        }
    }
    deltas
        .into_iter()
        .map(|delta| {
            let group: Vec<&ExperimentReport> = reports.iter().filter(|r| r.delta == delta).collect();
            ConvergenceRow {
                delta,
                alpha: group[0].alpha,
                seed_count: group.len(),
                median_max_error_full: median(group.iter().map(|r| r.max_error_full).collect()),
                median_max_error_interior: median(group.iter().map(|r| r.max_error_interior).collect()),
            }
        })
        .collect()
}

pub fn convergence_study(
    example: Example,
    deltas: &[f64],
    seeds: &[u64],
    n: usize,
    exec: Execution,
) -> Result<Vec<ConvergenceRow>> {
    Ok(aggregate(&run_all(example, deltas, seeds, n, exec)?))
}

pub fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
