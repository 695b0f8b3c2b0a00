//! Regularization of first-kind linear equations by the perturbation method.
//!
//! The central object is the perturbed equation `(Ã + B(α)) x = f̃`, where
//! `Ã`, `f̃` are δ-accurate versions of the exact operator and data and
//! `B(α)` is a stabilizing operator. The crate provides
//!
//! - [`regularization`]: dense regularized solves with the diagnostics that
//!   control their error (resolvent bound, margin `q`, stabilization gap,
//!   a-priori error bound), parameter coordination and sweeps;
//! - [`stable_diff`]: the closed-form resolvent of the Volterra integration
//!   operator and stable differentiation of noisy samples built on it;
//! - [`fredholm`]: finite-rank stabilizers for matrices with a kernel;
//! - [`experiment`]: seeded noisy-differentiation experiments and
//!   convergence studies.
//!
//! Batch work (sweeps, experiment grids) runs on rayon when the `parallel`
//! feature is enabled, and sequentially otherwise; see [`par::Execution`].

// `!(x > 0.0)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod fredholm;
pub mod grid;
pub mod linalg;
pub mod operator;
pub mod par;
pub mod regularization;
pub mod stabilizer;
pub mod stable_diff;

pub use error::{Error, Result, Warning};
pub use grid::GridFunction;
pub use operator::{DiscreteOperator, Grid, OperatorKind};
pub use par::Execution;
pub use regularization::{CoordinationRule, ExactData, RegConfig, SolveReport};
pub use stabilizer::{FiniteDim, InnerProduct, Stabilizer};
