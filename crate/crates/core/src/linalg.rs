//! Dense linear algebra at desk scale, backed by nalgebra's LU and SVD.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot size below which an LU factorization is treated as singular.
const PIVOT_RTOL: f64 = 1e-14;

struct Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>);

impl Lu {
    fn factor(m: &DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let lu = m.clone().lu();
        let u = lu.u();
        let diag = u.diagonal();
        let max = diag.amax();
        let min = diag.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
        if !(max > 0.0) || !min.is_finite() || min <= PIVOT_RTOL * max {
            return Err(Error::SingularSystem);
        }
        Ok(Self(lu))
    }

    fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let x = self.0.solve(rhs).ok_or(Error::SingularSystem)?;
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(Error::SingularSystem)
        }
    }
}

/// Solves `m x = rhs` by LU with partial pivoting.
pub fn solve(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    if rhs.len() != m.nrows() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: rhs.len() });
    }
    Lu::factor(m)?.solve(rhs)
}

/// `max_i sum_j |m_ij|`, the operator norm induced by the sup-norm.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Sup-norm operator norm of `m^{-1}`, computed from the explicit inverse.
pub fn inverse_inf_norm(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.nrows();
    let lu = Lu::factor(m)?;
    let mut inv = DMatrix::<f64>::identity(n, n);
    if !lu.0.solve_mut(&mut inv) || inv.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(inf_norm(&inv))
}

pub fn vec_sup(v: &DVector<f64>) -> f64 {
    v.amax()
}

/// Minimum-norm least-squares solution of `m x = rhs`.
pub fn lstsq(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    if rhs.len() != m.nrows() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: rhs.len() });
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = f64::EPSILON * (m.nrows().max(m.ncols()) as f64) * smax;
    let x = svd.solve(rhs, eps).map_err(|_| Error::LeastSquaresFailed)?;
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::LeastSquaresFailed)
    }
}

/// Orthonormal basis of `ker m` from singular vectors with `sigma_i < rtol * sigma_1`.
pub fn null_space(m: &DMatrix<f64>, rtol: f64) -> Vec<DVector<f64>> {
    let (nrows, ncols) = m.shape();
    // Pad to square so every right singular vector is available.
    let k = nrows.max(ncols);
    let mut sq = DMatrix::<f64>::zeros(k, ncols);
    sq.view_mut((0, 0), (nrows, ncols)).copy_from(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < rtol * smax || smax == 0.0)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

/// Orthonormal basis of `ker m^T`.
pub fn left_null_space(m: &DMatrix<f64>, rtol: f64) -> Vec<DVector<f64>> {
    null_space(&m.transpose(), rtol)
}
