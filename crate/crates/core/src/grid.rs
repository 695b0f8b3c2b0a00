//! Uniformly sampled real functions on a closed interval.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};

/// Samples `values[i]` of a function at `t_i = a + i*h`, `h = (b - a)/(n - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidGrid(format!("need finite a < b, got [{a}, {b}]")));
        }
        if values.len() < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {}", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("sample {i} is not finite")));
        }
        Ok(Self { a, b, values })
    }

    /// Samples `f` on an `n`-point uniform grid over `[a, b]`.
    pub fn from_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {n}")));
        }
        let h = (b - a) / (n - 1) as f64;
        Self::new(a, b, (0..n).map(|i| f(a + i as f64 * h)).collect())
    }

    /// A grid function on the same grid as `self` with new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: values.len() });
        }
        Self::new(self.a, self.b, values)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.len() - 1) as f64
    }

    /// Node `i`; the last node is exactly `b`.
    pub fn t(&self, i: usize) -> f64 {
        if i + 1 == self.len() {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.t(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.values)
    }

    /// Trapezoidal quadrature weights `h*[1/2, 1, ..., 1, 1/2]`.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.len(), self.h())
    }
}

pub(crate) fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

pub fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
