//! Discrete linear operators `A` and `Ã` acting on sampled functions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{trapezoid_weights, GridFunction};

/// Uniform grid on `[a, b]` with `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a || n < 2 {
            return Err(Error::InvalidGrid(format!("need a < b and n >= 2, got [{a}, {b}], n = {n}")));
        }
        Ok(Self { a, b, n })
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.n).map(|i| if i + 1 == self.n { self.b } else { self.a + i as f64 * h }).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> DVector<f64> {
        DVector::from_iterator(self.n, self.times().into_iter().map(f))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    Dense(DMatrix<f64>),
    /// Cumulative trapezoidal integral `x -> int_a^t x(s) ds`.
    VolterraIntegration(Grid),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub kind: OperatorKind,
    pub norm_hint: Option<f64>,
}

impl DiscreteOperator {
    pub fn dense(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self { kind: OperatorKind::Dense(m), norm_hint: None })
    }

    pub fn volterra(grid: Grid) -> Self {
        // sup-norm of the trapezoid matrix is exactly b - a
        Self { kind: OperatorKind::VolterraIntegration(grid), norm_hint: Some(grid.b - grid.a) }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            OperatorKind::Dense(m) => m.nrows(),
            OperatorKind::VolterraIntegration(g) => g.n,
        }
    }

    pub fn grid(&self) -> Option<Grid> {
        match &self.kind {
            OperatorKind::VolterraIntegration(g) => Some(*g),
            OperatorKind::Dense(_) => None,
        }
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x.len())?;
        Ok(match &self.kind {
            OperatorKind::Dense(m) => m * x,
            OperatorKind::VolterraIntegration(g) => {
                DVector::from_vec(cumulative_trapezoid(x.as_slice(), g.h()))
            }
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.kind {
            OperatorKind::Dense(m) => m.clone(),
            OperatorKind::VolterraIntegration(g) => volterra_matrix(g.n, g.h()),
        }
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: n });
        }
        Ok(())
    }
}

/// Row `i` carries the trapezoid weights `h*[1/2, 1, ..., 1, 1/2]` over nodes `0..=i`.
pub fn volterra_matrix(n: usize, h: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 1..n {
        let w = trapezoid_weights(i + 1, h);
        for (j, wj) in w.into_iter().enumerate() {
            m[(i, j)] = wj;
        }
    }
    m
}

pub(crate) fn cumulative_trapezoid(x: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in x.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

impl From<&GridFunction> for Grid {
    fn from(g: &GridFunction) -> Self {
        Grid { a: g.a(), b: g.b(), n: g.len() }
    }
}
