//! JSON problem files for `solve` and `sweep`.

use nalgebra::{DMatrix, DVector};
use serde::de::IgnoredAny;
use serde::Deserialize;

use perturbreg::fredholm::{build_stabilizer, FredholmBasis};
use perturbreg::regularization::coordinate_alpha;
use perturbreg::{CoordinationRule, DiscreteOperator, ExactData, Grid, RegConfig, Stabilizer};

use crate::failure::{CliResult, Failure};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    /// Row-major `Ã`.
    pub matrix: Option<Vec<Vec<f64>>>,
    /// `"volterra"` for the trapezoid integration operator on `interval`.
    pub operator: Option<String>,
    pub interval: Option<[f64; 2]>,
    #[serde(default)]
    pub stabilizer: StabilizerSpec,
    pub rhs: Option<Vec<f64>>,
    #[serde(default)]
    pub delta: f64,
    pub alpha: Option<f64>,
    pub rule: Option<String>,
    pub q_max: Option<f64>,
    pub exact_solution: Option<Vec<f64>>,
    pub exact_matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StabilizerSpec {
    #[default]
    #[serde(skip)]
    Default,
    /// `B(α) = αI`; the payload is ignored.
    ScalarAlpha(IgnoredAny),
    FiniteDim(FiniteDimSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteDimSpec {
    pub phis: Vec<Vec<f64>>,
    pub psis: Vec<Vec<f64>>,
    pub gammas: Option<Vec<Vec<f64>>>,
    pub zs: Option<Vec<Vec<f64>>>,
}

/// A validated problem ready for the numerics.
#[derive(Debug)]
pub struct Problem {
    pub a_tilde: DiscreteOperator,
    pub stabilizer: StabilizerKind,
    pub rhs: Option<DVector<f64>>,
    pub config: RegConfig,
    /// `None` for finite-rank stabilizers, which do not use α.
    pub alpha: Option<f64>,
    pub exact: Option<ExactData>,
}

#[derive(Debug)]
pub enum StabilizerKind {
    Scalar,
    Finite(FredholmBasis),
}

impl Problem {
    pub fn stabilizer(&self) -> Stabilizer {
        match &self.stabilizer {
            StabilizerKind::Scalar => Stabilizer::ScalarAlpha,
            StabilizerKind::Finite(basis) => basis.stabilizer(),
        }
    }

    /// The operator diagnostics refer to: the exact one when known.
    pub fn reference_operator(&self) -> &DiscreteOperator {
        self.exact.as_ref().and_then(|e| e.operator.as_ref()).unwrap_or(&self.a_tilde)
    }
}

fn schema(msg: impl Into<String>) -> Failure {
    Failure::Input(format!("problem file: {}", msg.into()))
}

pub fn parse(text: &str) -> CliResult<Problem> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    file.validate()
}

fn square_matrix(name: &str, rows: &[Vec<f64>]) -> CliResult<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(schema(format!("{name} is empty")));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(schema(format!("{name} row {i} has {} entries, expected {n}", r.len())));
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    if m.iter().any(|v| !v.is_finite()) {
        return Err(schema(format!("{name} has non-finite entries")));
    }
    Ok(m)
}

fn vector(name: &str, v: &[f64], n: usize) -> CliResult<DVector<f64>> {
    if v.len() != n {
        return Err(schema(format!("{name} has length {}, expected {n}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(schema(format!("{name} has non-finite entries")));
    }
    Ok(DVector::from_column_slice(v))
}

fn vectors(name: &str, vs: &[Vec<f64>], n: usize) -> CliResult<Vec<DVector<f64>>> {
    vs.iter().enumerate().map(|(i, v)| vector(&format!("{name}[{i}]"), v, n)).collect()
}

impl ProblemFile {
    fn dimension_hint(&self) -> Option<usize> {
        self.rhs.as_ref().or(self.exact_solution.as_ref()).map(Vec::len)
    }

    fn operator(&self) -> CliResult<DiscreteOperator> {
        match (&self.matrix, self.operator.as_deref()) {
            (Some(_), Some(_)) => Err(schema("give either 'matrix' or 'operator', not both")),
            (None, None) => Err(schema("missing 'matrix' or 'operator'")),
            (Some(rows), None) => {
                if self.interval.is_some() {
                    return Err(schema("'interval' only applies to 'operator'"));
                }
                Ok(DiscreteOperator::dense(square_matrix("matrix", rows)?)?)
            }
            (None, Some("volterra")) => {
                let [a, b] = self.interval.ok_or_else(|| schema("'operator': \"volterra\" needs 'interval'"))?;
                let n = self.dimension_hint().ok_or_else(|| schema("volterra size comes from 'rhs' or 'exact_solution'"))?;
                Ok(DiscreteOperator::volterra(Grid::new(a, b, n).map_err(|e| schema(e.to_string()))?))
            }
            (None, Some(other)) => Err(schema(format!("unknown operator '{other}'"))),
        }
    }

    fn validate(self) -> CliResult<Problem> {
        let a_tilde = self.operator()?;
        let n = a_tilde.dim();
        let rhs = self.rhs.as_deref().map(|v| vector("rhs", v, n)).transpose()?;

        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(schema(format!("'delta' must be finite and non-negative, got {}", self.delta)));
        }
        let rule = match (&self.alpha, &self.rule) {
            (Some(_), Some(_)) => return Err(schema("give either 'alpha' or 'rule', not both")),
            (Some(a), None) => CoordinationRule::Fixed(*a),
            (None, Some(r)) => r.parse().map_err(|e: perturbreg::Error| schema(e.to_string()))?,
            (None, None) => CoordinationRule::SqrtDelta,
        };
        let q_max = self.q_max.unwrap_or(RegConfig::DEFAULT_Q_MAX);

        let (stabilizer, uses_alpha) = match self.stabilizer {
            StabilizerSpec::Default | StabilizerSpec::ScalarAlpha(_) => (StabilizerKind::Scalar, true),
            StabilizerSpec::FiniteDim(fd) => {
                let phis = vectors("phis", &fd.phis, n)?;
                let psis = vectors("psis", &fd.psis, n)?;
                let gammas = fd.gammas.as_deref().map(|g| vectors("gammas", g, n)).transpose()?;
                let zs = fd.zs.as_deref().map(|z| vectors("zs", z, n)).transpose()?;
                let (basis, _) = build_stabilizer(phis, psis, gammas, zs)?;
                (StabilizerKind::Finite(basis), false)
            }
        };
        let (config, alpha) = if uses_alpha {
            let config = RegConfig::new(self.delta, rule, q_max).map_err(|e| schema(e.to_string()))?;
            (config, Some(coordinate_alpha(self.delta, rule)?))
        } else {
            // α is unused; keep the config valid for any δ
            let config = RegConfig::new(self.delta, CoordinationRule::Fixed(1.0), q_max).map_err(|e| schema(e.to_string()))?;
            (config, None)
        };

        let exact = match (self.exact_solution, self.exact_matrix) {
            (None, Some(_)) => return Err(schema("'exact_matrix' needs 'exact_solution'")),
            (None, None) => None,
            (Some(x), m) => Some(ExactData {
                x_star: vector("exact_solution", &x, n)?,
                operator: match m {
                    Some(rows) => {
                        let m = square_matrix("exact_matrix", &rows)?;
                        if m.nrows() != n {
                            return Err(schema(format!("exact_matrix is {0}x{0}, expected {n}x{n}", m.nrows())));
                        }
                        Some(DiscreteOperator::dense(m)?)
                    }
                    None => None,
                },
            }),
        };
        Ok(Problem { a_tilde, stabilizer, rhs, config, alpha, exact })
    }
}
