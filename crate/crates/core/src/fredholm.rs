//! Finite-rank stabilizers for matrices with a nontrivial kernel.
//!
//! Given bases `φ_i` of `ker A` and `ψ_i` of `ker A*`, choose `γ_i` with
//! `det[<φ_i, γ_k>] ≠ 0` and `z_i` with `<z_i, ψ_k> = δ_ik`. Then
//! `A x + Σ <x, γ_i> z_i = f − Σ <f, ψ_i> z_i` is uniquely solvable and its
//! solution satisfies `<x, γ_i> = 0` for consistent data.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::DiscreteOperator;
use crate::regularization::{attach_exact, invertibility_margin, ExactData, RegConfig, SolveReport};
use crate::stabilizer::{FiniteDim, InnerProduct, Stabilizer};

/// Tolerance on `|<z_i, ψ_k> − δ_ik|`.
pub const BIORTHOGONALITY_TOL: f64 = 1e-10;
/// Relative tolerance of the selection Gram determinant.
pub const GRAM_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FredholmBasis {
    pub phis: Vec<DVector<f64>>,
    pub psis: Vec<DVector<f64>>,
    pub gammas: Vec<DVector<f64>>,
    pub zs: Vec<DVector<f64>>,
}

impl FredholmBasis {
    pub fn rank(&self) -> usize {
        self.phis.len()
    }

    pub fn stabilizer(&self) -> Stabilizer {
        Stabilizer::FiniteDim(FiniteDim {
            gammas: self.gammas.clone(),
            zs: self.zs.clone(),
            inner: InnerProduct::Euclidean,
        })
    }
}

fn gram(u: &[DVector<f64>], v: &[DVector<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(u.len(), v.len(), |i, k| u[i].dot(&v[k]))
}

fn check_family(name: &str, vs: &[DVector<f64>], len: usize, dim: usize) -> Result<()> {
    if vs.len() != len {
        return Err(Error::InvalidInput(format!("{name} has {} vectors, expected {len}", vs.len())));
    }
    if let Some(v) = vs.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    Ok(())
}

/// Validates (and completes) the four families; `γ = φ` and `z = Ψ (ΨᵀΨ)⁻¹` by default.
pub fn build_stabilizer(
    phis: Vec<DVector<f64>>,
    psis: Vec<DVector<f64>>,
    gammas: Option<Vec<DVector<f64>>>,
    zs: Option<Vec<DVector<f64>>>,
) -> Result<(FredholmBasis, Stabilizer)> {
    let rank = phis.len();
    if rank == 0 {
        return Err(Error::InvalidInput("need at least one kernel vector".into()));
    }
    let dim = phis[0].len();
    check_family("phis", &phis, rank, dim)?;
    check_family("psis", &psis, rank, dim)?;

    let gammas = gammas.unwrap_or_else(|| phis.clone());
    check_family("gammas", &gammas, rank, dim)?;

    let det = gram(&phis, &gammas).determinant();
    let scale: f64 = phis.iter().zip(&gammas).map(|(p, g)| p.norm() * g.norm()).product();
    let tol = GRAM_RTOL * scale;
    if !(det.abs() >= tol) || scale == 0.0 {
        return Err(Error::DegenerateGram { det, tol });
    }

    let zs = match zs {
        Some(zs) => zs,
        None => {
            let g_inv = gram(&psis, &psis).try_inverse().ok_or(Error::BiorthogonalityFailed { max_dev: f64::INFINITY })?;
            (0..rank)
                .map(|i| psis.iter().enumerate().fold(DVector::zeros(dim), |acc, (j, p)| acc + p * g_inv[(j, i)]))
                .collect()
        }
    };
    check_family("zs", &zs, rank, dim)?;

    let cross = gram(&zs, &psis);
    let max_dev = (cross - DMatrix::<f64>::identity(rank, rank)).amax();
    if !(max_dev <= BIORTHOGONALITY_TOL) {
        return Err(Error::BiorthogonalityFailed { max_dev });
    }

    let basis = FredholmBasis { phis, psis, gammas, zs };
    let stab = basis.stabilizer();
    Ok((basis, stab))
}

/// `f − Σ <f, ψ_i> z_i`, which is orthogonal to every `ψ_k`.
pub fn project_rhs(f: &DVector<f64>, basis: &FredholmBasis) -> Result<DVector<f64>> {
    let mut out = f.clone();
    for (psi, z) in basis.psis.iter().zip(&basis.zs) {
        if psi.len() != f.len() {
            return Err(Error::DimensionMismatch { expected: psi.len(), found: f.len() });
        }
        out.axpy(-f.dot(psi), z, 1.0);
    }
    Ok(out)
}

/// Solves `(Ã + B) x = f̃ − Σ <f̃, ψ_i> z_i` and reports `<x, γ_i>`.
pub fn solve_fredholm_regularized(
    a_tilde: &DiscreteOperator,
    basis: &FredholmBasis,
    f_tilde: &DVector<f64>,
    config: &RegConfig,
    exact: Option<&ExactData>,
) -> Result<SolveReport> {
    a_tilde.check_dim(f_tilde.len())?;
    let n = a_tilde.dim();
    let stab = basis.stabilizer();
    let assembled = a_tilde.to_dense() + stab.matrix(0.0, n)?;
    let rhs = project_rhs(f_tilde, basis)?;
    let x = linalg::solve(&assembled, &rhs)?;
    let residual_norm = linalg::vec_sup(&(&assembled * &x - &rhs));

    let reference = exact.and_then(|e| e.operator.as_ref()).unwrap_or(a_tilde);
    reference.check_dim(n)?;
    let c_alpha_est = linalg::inverse_inf_norm(&(reference.to_dense() + stab.matrix(0.0, n)?))?;
    let q_est = invertibility_margin(config.delta, c_alpha_est);

    let mut report = SolveReport {
        solution: x.as_slice().to_vec(),
        alpha: 0.0,
        delta: config.delta,
        residual_norm,
        c_alpha_est,
        q_est,
        q_exceeded: q_est >= config.q_max,
        gap: None,
        bound: None,
        bound_components: None,
        observed_error: None,
        selection_functionals: Some(basis.gammas.iter().map(|g| x.dot(g)).collect()),
    };
    if let Some(exact) = exact {
        attach_exact(&mut report, reference, &stab, &x, exact)?;
    }
    Ok(report)
}

/// Right and left kernels of `m` from singular values below `1e-10 σ₁`.
pub fn kernel_bases(m: &DMatrix<f64>) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    const RTOL: f64 = 1e-10;
    (linalg::null_space(m, RTOL), linalg::left_null_space(m, RTOL))
}
