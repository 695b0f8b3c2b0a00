//! Stable differentiation of noisy samples.
//!
//! With `A x = ∫_a^t x(s) ds` and `B(α) = αI` the perturbed equation
//! `A x + α x = f̃` has the closed-form resolvent
//!
//! ```text
//! (A + αI)⁻¹ g = g/α − (1/α²) ∫_a^t exp(−(t−s)/α) g(s) ds
//! ```
//!
//! Applied to `f̃ = ỹ − c − d (t − a)` it returns a regularized estimate of
//! `y′(t) − y′(a)`; adding `d` back gives the derivative itself.

use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::grid::GridFunction;
use crate::operator::cumulative_trapezoid;

/// Discretization of the exponential convolution inside the resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    /// Kernel integrated exactly against the piecewise-linear interpolant of `g`.
    ///
    /// Collapses to the recurrence `x_i = E x_{i-1} + (1 - E) (g_i - g_{i-1}) / h`,
    /// `E = exp(-h/α)`, `x_0 = g_0/α`, which stays bounded as `α/h -> 0`.
    #[default]
    ProductTrapezoid,
    /// Plain trapezoid rule on the product `exp(-(t-s)/α) g(s)`.
    ///
    /// Its error grows like `h² |g| / α³`, so it is only usable for `α >> h`.
    Trapezoid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolvent {
    pub output: GridFunction,
    pub warning: Option<Warning>,
}

/// `(A + αI)⁻¹ g` on the grid of `g`, using [`Quadrature::ProductTrapezoid`].
pub fn resolvent_apply(g: &GridFunction, alpha: f64) -> Result<Resolvent> {
    resolvent_apply_with(g, alpha, Quadrature::default())
}

pub fn resolvent_apply_with(g: &GridFunction, alpha: f64, quadrature: Quadrature) -> Result<Resolvent> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let h = g.h();
    let v = g.values();
    let decay = (-h / alpha).exp();
    let mut out = Vec::with_capacity(v.len());
    match quadrature {
        Quadrature::ProductTrapezoid => {
            let gain = -(-h / alpha).exp_m1() / h;
            let mut x = v[0] / alpha;
            out.push(x);
            for w in v.windows(2) {
                x = decay * x + gain * (w[1] - w[0]);
                out.push(x);
            }
        }
        Quadrature::Trapezoid => {
            let mut conv = 0.0;
            out.push(v[0] / alpha);
            for w in v.windows(2) {
                conv = decay * conv + 0.5 * h * (w[1] + decay * w[0]);
                out.push(w[1] / alpha - conv / (alpha * alpha));
            }
        }
    }
    let warning = (alpha < h).then_some(Warning::AlphaTooSmall { alpha, h });
    Ok(Resolvent { output: g.with_values(out)?, warning })
}

/// Cumulative trapezoid integral `∫_a^t x(s) ds`; the first sample is 0.
pub fn volterra_apply(x: &GridFunction) -> GridFunction {
    x.with_values(cumulative_trapezoid(x.values(), x.h())).expect("same grid")
}

/// `(1/α)(2 − exp(−(b−a)/α))`, a sup-norm bound on `(A + αI)⁻¹` over `[a, b]`.
pub fn resolvent_norm_bound(alpha: f64, a: f64, b: f64) -> f64 {
    (2.0 - (-(b - a) / alpha).exp()) / alpha
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BaselineSource {
    UserSupplied,
    AutoEstimated { window_width: f64 },
}

/// Estimates `c ≈ y(a)` and `d ≈ y′(a)` removed before regularizing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Baseline {
    pub c: f64,
    pub d: f64,
    pub source: BaselineSource,
}

impl Baseline {
    pub fn given(c: f64, d: f64) -> Self {
        Self { c, d, source: BaselineSource::UserSupplied }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineChoice {
    Given { c: f64, d: f64 },
    /// Least-squares line over `[a, a + max(2h, α)]`.
    Auto,
    /// Least-squares line over `[a, a + w]`.
    Window(f64),
}

/// Least-squares line through the samples in `[a, a + window_width]`.
pub fn estimate_baseline(y: &GridFunction, window_width: f64) -> Result<Baseline> {
    let h = y.h();
    let narrow = Error::WindowTooNarrow { window: window_width, h };
    if !(window_width > 0.0 && window_width.is_finite()) {
        return Err(narrow);
    }
    let m = ((window_width / h) * (1.0 + 1e-12)).floor() as usize + 1;
    let m = m.min(y.len());
    if m < 2 {
        return Err(narrow);
    }
    let ys = &y.values()[..m];
    let s_mean = 0.5 * (m - 1) as f64 * h;
    let y_mean = ys.iter().sum::<f64>() / m as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, yi) in ys.iter().enumerate() {
        let ds = i as f64 * h - s_mean;
        sxy += ds * (yi - y_mean);
        sxx += ds * ds;
    }
    let d = sxy / sxx;
    Ok(Baseline { c: y_mean - d * s_mean, d, source: BaselineSource::AutoEstimated { window_width } })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeResult {
    /// Regularized estimate of `y′(t) − y′(a)`.
    pub x_alpha: GridFunction,
    /// `x_alpha + d`
    pub derivative: GridFunction,
    pub alpha: f64,
    pub baseline: Baseline,
    /// Width `3α` of the biased region next to `a`.
    pub boundary_layer_width: f64,
    pub warnings: Vec<Warning>,
}

pub fn regularized_derivative(y: &GridFunction, alpha: f64, baseline: BaselineChoice) -> Result<DerivativeResult> {
    regularized_derivative_with(y, alpha, baseline, Quadrature::default())
}

pub fn regularized_derivative_with(
    y: &GridFunction,
    alpha: f64,
    baseline: BaselineChoice,
    quadrature: Quadrature,
) -> Result<DerivativeResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let baseline = match baseline {
        BaselineChoice::Given { c, d } => Baseline::given(c, d),
        BaselineChoice::Auto => estimate_baseline(y, (2.0 * y.h()).max(alpha))?,
        BaselineChoice::Window(w) => estimate_baseline(y, w)?,
    };
    let Baseline { c, d, .. } = baseline;
    let a = y.a();
    let f_tilde: Vec<f64> = y.times().zip(y.values()).map(|(t, v)| v - c - d * (t - a)).collect();
    let resolved = resolvent_apply_with(&y.with_values(f_tilde)?, alpha, quadrature)?;
    let derivative = resolved.output.with_values(resolved.output.values().iter().map(|x| x + d).collect())?;
    Ok(DerivativeResult {
        x_alpha: resolved.output,
        derivative,
        alpha,
        baseline,
        boundary_layer_width: 3.0 * alpha,
        warnings: resolved.warning.into_iter().collect(),
    })
}
