//! Regularized solves `(Ã + B(α)) x = f̃` and the quantities that control
//! their error: the resolvent bound `c(|α|)`, the margin `q = δ c(|α|)`,
//! the stabilization gap `S(α, x*)` and the a-priori error bound.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{DiscreteOperator, OperatorKind};
use crate::par::{self, Execution};
use crate::stabilizer::Stabilizer;
use crate::stable_diff::resolvent_norm_bound;

/// How the regularization parameter follows the noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoordinationRule {
    /// `α = √δ`
    SqrtDelta,
    /// `α = δ^p`, `0 < p < 1`
    PowerDelta(f64),
    /// `α = α₀` regardless of δ
    Fixed(f64),
}

impl std::str::FromStr for CoordinationRule {
    type Err = Error;

    /// Parses `sqrt`, `power:<p>` or `fixed:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unrecognised coordination rule '{s}'"));
        let s = s.trim();
        if s == "sqrt" {
            return Ok(CoordinationRule::SqrtDelta);
        }
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        let value: f64 = arg.trim().parse().map_err(|_| bad())?;
        let rule = match name.trim() {
            "power" => CoordinationRule::PowerDelta(value),
            "fixed" => CoordinationRule::Fixed(value),
            _ => return Err(bad()),
        };
        rule.validate()?;
        Ok(rule)
    }
}

impl CoordinationRule {
    fn validate(&self) -> Result<()> {
        match *self {
            CoordinationRule::PowerDelta(p) if !(p > 0.0 && p < 1.0) => {
                Err(Error::InvalidInput(format!("power rule exponent must lie in (0, 1), got {p}")))
            }
            CoordinationRule::Fixed(a) if !(a > 0.0 && a.is_finite()) => Err(Error::InvalidAlpha(a)),
            _ => Ok(()),
        }
    }
}

/// Picks α for noise level δ. The δ-driven rules need `δ > 0`.
pub fn coordinate_alpha(delta: f64, rule: CoordinationRule) -> Result<f64> {
    rule.validate()?;
    if let CoordinationRule::Fixed(a) = rule {
        if !(delta >= 0.0) {
            return Err(Error::DegenerateDelta(delta));
        }
        return Ok(a);
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::DegenerateDelta(delta));
    }
    let alpha = match rule {
        CoordinationRule::SqrtDelta => delta.sqrt(),
        CoordinationRule::PowerDelta(p) => delta.powf(p),
        CoordinationRule::Fixed(_) => unreachable!(),
    };
    if alpha > 0.0 {
        Ok(alpha)
    } else {
        Err(Error::DegenerateDelta(delta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegConfig {
    pub delta: f64,
    pub rule: CoordinationRule,
    /// Largest acceptable `q = δ c(|α|)`; must lie in `(0, 1)`.
    pub q_max: f64,
}

impl RegConfig {
    pub const DEFAULT_Q_MAX: f64 = 0.5;

    pub fn new(delta: f64, rule: CoordinationRule, q_max: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::DegenerateDelta(delta));
        }
        if !(q_max > 0.0 && q_max < 1.0) {
            return Err(Error::QOutOfRange(q_max));
        }
        let cfg = Self { delta, rule, q_max };
        cfg.alpha()?;
        Ok(cfg)
    }

    pub fn alpha(&self) -> Result<f64> {
        coordinate_alpha(self.delta, self.rule)
    }
}

/// The exact data a synthetic problem is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactData {
    pub x_star: DVector<f64>,
    /// Exact operator `A`; when absent `Ã` is taken as exact.
    pub operator: Option<DiscreteOperator>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundComponents {
    /// `S(α, x*)`
    pub gap: f64,
    /// `δ c / (1 - q)`
    pub amplification: f64,
    pub x_star_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub alpha: f64,
    pub delta: f64,
    pub residual_norm: f64,
    pub c_alpha_est: f64,
    pub q_est: f64,
    pub q_exceeded: bool,
    pub gap: Option<f64>,
    pub bound: Option<f64>,
    pub bound_components: Option<BoundComponents>,
    pub observed_error: Option<f64>,
    pub selection_functionals: Option<Vec<f64>>,
}

/// Upper estimate of `‖(A + B(α))⁻¹‖` in the sup-norm.
///
/// Uses the closed-form bound for the Volterra operator with `B = αI` and the
/// exact inverse row-sum norm otherwise.
pub fn resolvent_estimate(a: &DiscreteOperator, b: &Stabilizer, alpha: f64) -> Result<f64> {
    match (&a.kind, b) {
        (OperatorKind::VolterraIntegration(g), Stabilizer::ScalarAlpha) => {
            Ok(resolvent_norm_bound(alpha, g.a, g.b))
        }
        _ => {
            let m = a.to_dense() + b.matrix(alpha, a.dim())?;
            linalg::inverse_inf_norm(&m)
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

pub fn solve_perturbed(
    a_tilde: &DiscreteOperator,
    b: &Stabilizer,
    alpha: f64,
    f_tilde: &DVector<f64>,
    config: &RegConfig,
    exact: Option<&ExactData>,
) -> Result<SolveReport> {
    check_alpha(alpha)?;
    a_tilde.check_dim(f_tilde.len())?;
    let assembled = a_tilde.to_dense() + b.matrix(alpha, a_tilde.dim())?;
    let x = linalg::solve(&assembled, f_tilde)?;
    let residual_norm = linalg::vec_sup(&(&assembled * &x - f_tilde));

    let reference = exact.and_then(|e| e.operator.as_ref()).unwrap_or(a_tilde);
    reference.check_dim(f_tilde.len())?;
    let c_alpha_est = resolvent_estimate(reference, b, alpha)?;
    let q_est = invertibility_margin(config.delta, c_alpha_est);

    let mut report = SolveReport {
        solution: x.as_slice().to_vec(),
        alpha,
        delta: config.delta,
        residual_norm,
        c_alpha_est,
        q_est,
        q_exceeded: q_est >= config.q_max,
        gap: None,
        bound: None,
        bound_components: None,
        observed_error: None,
        selection_functionals: None,
    };
    if let Some(exact) = exact {
        attach_exact(&mut report, reference, b, &x, exact)?;
    }
    Ok(report)
}

pub(crate) fn attach_exact(
    report: &mut SolveReport,
    reference: &DiscreteOperator,
    b: &Stabilizer,
    x: &DVector<f64>,
    exact: &ExactData,
) -> Result<()> {
    reference.check_dim(exact.x_star.len())?;
    let gap = stabilization_gap(reference, b, report.alpha, &exact.x_star)?;
    let x_star_norm = linalg::vec_sup(&exact.x_star);
    report.gap = Some(gap);
    report.observed_error = Some(linalg::vec_sup(&(x - &exact.x_star)));
    if report.q_est < 1.0 {
        let bound = error_bound(gap, report.delta, report.c_alpha_est, report.q_est, x_star_norm)?;
        report.bound = Some(bound);
        report.bound_components = Some(BoundComponents {
            gap,
            amplification: report.delta * report.c_alpha_est / (1.0 - report.q_est),
            x_star_norm,
        });
    }
    Ok(())
}

/// `S + (δ c / (1 - q)) (1 + ‖x*‖ + S)`.
pub fn error_bound(gap: f64, delta: f64, c_alpha: f64, q: f64, x_star_norm: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::QOutOfRange(q));
    }
    if [gap, delta, c_alpha, x_star_norm].iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidInput("error bound inputs must be non-negative".into()));
    }
    Ok(gap + delta * c_alpha / (1.0 - q) * (1.0 + x_star_norm + gap))
}

/// `q = δ c(|α|)`; the solve is only covered by the bound when `q < 1`.
pub fn invertibility_margin(delta: f64, c_alpha: f64) -> f64 {
    delta * c_alpha
}

/// `S(α, x*) = ‖(A + B(α))⁻¹ B(α) x*‖∞`.
pub fn stabilization_gap(a: &DiscreteOperator, b: &Stabilizer, alpha: f64, x_star: &DVector<f64>) -> Result<f64> {
    if matches!(b, Stabilizer::ScalarAlpha) {
        check_alpha(alpha)?;
    }
    a.check_dim(x_star.len())?;
    let assembled = a.to_dense() + b.matrix(alpha, a.dim())?;
    let y = linalg::solve(&assembled, &b.apply(alpha, x_star)?)?;
    Ok(linalg::vec_sup(&y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub gap: f64,
    pub c_alpha_est: f64,
}

/// One stabilization gap per α; each entry fails independently.
pub fn stabilization_sweep(
    a: &DiscreteOperator,
    b: &Stabilizer,
    alphas: &[f64],
    x_star: &DVector<f64>,
    exec: Execution,
) -> Vec<Result<SweepPoint>> {
    par::map(exec, alphas, |&alpha| {
        Ok(SweepPoint {
            alpha,
            gap: stabilization_gap(a, b, alpha, x_star)?,
            c_alpha_est: resolvent_estimate(a, b, alpha)?,
        })
    })
}

/// True when the gaps never increase along the sweep.
pub fn gaps_nonincreasing(points: &[SweepPoint]) -> bool {
    points.windows(2).all(|w| w[1].gap <= w[0].gap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep {
    pub x: DVector<f64>,
    /// `A x_i - B x_{i-1}`; nonzero components flag an unsolvable step.
    pub residual: DVector<f64>,
}

impl ChainStep {
    pub fn residual_norm(&self) -> f64 {
        linalg::vec_sup(&self.residual)
    }
}

/// Least-squares chain `A x_i = B x_{i-1}` for `i = 1..n-1`, with `B` taken at `α = 1`.
pub fn chain_solve(a: &DiscreteOperator, b: &Stabilizer, x0: &DVector<f64>, n: usize) -> Result<Vec<ChainStep>> {
    if n == 0 {
        return Err(Error::InvalidInput("chain length must be at least 1".into()));
    }
    a.check_dim(x0.len())?;
    let dense = a.to_dense();
    let mut steps = Vec::with_capacity(n - 1);
    let mut prev = x0.clone();
    for _ in 1..n {
        let rhs = b.apply(1.0, &prev)?;
        let x = linalg::lstsq(&dense, &rhs)?;
        let residual = &dense * &x - rhs;
        prev = x.clone();
        steps.push(ChainStep { x, residual });
    }
    Ok(steps)
}
