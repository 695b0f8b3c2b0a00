//! Stabilizing operators `B(α)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::trapezoid_weights;
use crate::linalg::inf_norm;

/// Inner product used by the selection functionals `<x, γ_i>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerProduct {
    /// `sum_j u_j v_j`
    Euclidean,
    /// Trapezoid-weighted product for grid functions with step `h`.
    Trapezoid { h: f64 },
}

impl InnerProduct {
    pub fn eval(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        match *self {
            InnerProduct::Euclidean => u.dot(v),
            InnerProduct::Trapezoid { h } => {
                let w = trapezoid_weights(u.len(), h);
                u.iter().zip(v.iter()).zip(w).map(|((a, b), w)| a * b * w).sum()
            }
        }
    }

    fn weighted(&self, v: &DVector<f64>) -> DVector<f64> {
        match *self {
            InnerProduct::Euclidean => v.clone(),
            InnerProduct::Trapezoid { h } => {
                DVector::from_iterator(v.len(), v.iter().zip(trapezoid_weights(v.len(), h)).map(|(a, w)| a * w))
            }
        }
    }
}

/// Finite-rank stabilizer `B x = sum_i <x, γ_i> z_i`, independent of α.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDim {
    pub gammas: Vec<DVector<f64>>,
    pub zs: Vec<DVector<f64>>,
    pub inner: InnerProduct,
}

impl FiniteDim {
    pub fn new(gammas: Vec<DVector<f64>>, zs: Vec<DVector<f64>>, inner: InnerProduct) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != zs.len() {
            return Err(Error::InvalidInput(format!(
                "need matching nonempty gamma/z lists, got {} and {}",
                gammas.len(),
                zs.len()
            )));
        }
        let n = gammas[0].len();
        for v in gammas.iter().chain(zs.iter()) {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        Ok(Self { gammas, zs, inner })
    }

    pub fn dim(&self) -> usize {
        self.gammas[0].len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stabilizer {
    /// `B(α) = α I`
    ScalarAlpha,
    FiniteDim(FiniteDim),
}

impl Stabilizer {
    /// Dense `n x n` matrix of `B(α)`.
    pub fn matrix(&self, alpha: f64, n: usize) -> Result<DMatrix<f64>> {
        match self {
            Stabilizer::ScalarAlpha => Ok(DMatrix::from_diagonal_element(n, n, alpha)),
            Stabilizer::FiniteDim(fd) => {
                if fd.dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: fd.dim() });
                }
                let mut m = DMatrix::zeros(n, n);
                for (g, z) in fd.gammas.iter().zip(&fd.zs) {
                    m += z * fd.inner.weighted(g).transpose();
                }
                Ok(m)
            }
        }
    }

    pub fn apply(&self, alpha: f64, x: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            Stabilizer::ScalarAlpha => Ok(x * alpha),
            Stabilizer::FiniteDim(fd) => {
                if fd.dim() != x.len() {
                    return Err(Error::DimensionMismatch { expected: fd.dim(), found: x.len() });
                }
                let mut out = DVector::zeros(x.len());
                for (g, z) in fd.gammas.iter().zip(&fd.zs) {
                    out.axpy(fd.inner.eval(x, g), z, 1.0);
                }
                Ok(out)
            }
        }
    }

    /// `d(|α|)`, the sup-norm of `B(α)`.
    pub fn norm(&self, alpha: f64, n: usize) -> Result<f64> {
        match self {
            Stabilizer::ScalarAlpha => Ok(alpha.abs()),
            Stabilizer::FiniteDim(_) => Ok(inf_norm(&self.matrix(alpha, n)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_alpha_is_alpha_identity() {
        let m = Stabilizer::ScalarAlpha.matrix(0.3, 3).unwrap();
        assert_eq!(m, DMatrix::from_diagonal_element(3, 3, 0.3));
        assert_eq!(Stabilizer::ScalarAlpha.norm(0.3, 3).unwrap(), 0.3);
    }

    #[test]
    fn finite_dim_matrix_agrees_with_apply() {
        for inner in [InnerProduct::Euclidean, InnerProduct::Trapezoid { h: 0.25 }] {
            let fd = FiniteDim::new(
                vec![DVector::from_vec(vec![1.0, 2.0, 0.0, -1.0, 0.5])],
                vec![DVector::from_vec(vec![0.0, 1.0, 1.0, 3.0, 2.0])],
                inner,
            )
            .unwrap();
            let b = Stabilizer::FiniteDim(fd);
            let x = DVector::from_vec(vec![0.3, -0.7, 1.1, 2.0, 0.1]);
            let via_matrix = b.matrix(123.0, 5).unwrap() * &x;
            let direct = b.apply(123.0, &x).unwrap();
            assert!((via_matrix - direct).amax() < 1e-13);
        }
    }

    #[test]
    fn finite_dim_rejects_mismatched_lists() {
        let v = DVector::from_vec(vec![1.0, 0.0]);
        assert!(FiniteDim::new(vec![v.clone()], vec![], InnerProduct::Euclidean).is_err());
        assert!(FiniteDim::new(vec![v], vec![DVector::zeros(3)], InnerProduct::Euclidean).is_err());
    }
}
