use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use perturbreg::fredholm::{build_stabilizer, project_rhs};
use perturbreg::linalg::{inf_norm, inverse_inf_norm};
use perturbreg::regularization::{solve_perturbed, stabilization_gap};
use perturbreg::stable_diff::{regularized_derivative, BaselineChoice};
use perturbreg::{CoordinationRule, DiscreteOperator, Grid, GridFunction, RegConfig, Stabilizer};

fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, n)
}

fn dvec(n: usize) -> impl Strategy<Value = DVector<f64>> {
    samples(n).prop_map(DVector::from_vec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_is_linear_with_zero_baseline(u in samples(64), v in samples(64), lambda in -3.0..3.0f64, alpha in 0.05..1.0f64) {
        let zero = BaselineChoice::Given { c: 0.0, d: 0.0 };
        let grid = |vals: Vec<f64>| GridFunction::new(0.0, 2.0, vals).unwrap();
        let d = |vals: Vec<f64>| regularized_derivative(&grid(vals), alpha, zero).unwrap().derivative.into_values();
        let du = d(u.clone());
        let dv = d(v.clone());
        let dsum = d(u.iter().zip(&v).map(|(a, b)| a + b).collect());
        let dscaled = d(u.iter().map(|a| lambda * a).collect());
        let scale = 1.0 + 10.0 / alpha;
        for i in 0..64 {
            prop_assert!((dsum[i] - du[i] - dv[i]).abs() <= 1e-12 * scale);
            prop_assert!((dscaled[i] - lambda * du[i]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn auto_baseline_absorbs_constants_and_trends(u in samples(128), k in -50.0..50.0f64, m in -20.0..20.0f64, alpha in 0.05..0.5f64) {
        let base = GridFunction::new(1.0, 3.0, u).unwrap();
        let shifted = base.with_values(base.values().iter().map(|v| v + k).collect()).unwrap();
        let tilted = base.with_values(base.times().zip(base.values()).map(|(t, v)| v + m * (t - 1.0)).collect()).unwrap();
        let d0 = regularized_derivative(&base, alpha, BaselineChoice::Auto).unwrap().derivative.into_values();
        let dk = regularized_derivative(&shifted, alpha, BaselineChoice::Auto).unwrap().derivative.into_values();
        let dm = regularized_derivative(&tilted, alpha, BaselineChoice::Auto).unwrap().derivative.into_values();
        for i in 0..d0.len() {
            prop_assert!((dk[i] - d0[i]).abs() <= 1e-10, "shift {} at {}", dk[i] - d0[i], i);
            prop_assert!((dm[i] - d0[i] - m).abs() <= 1e-10, "trend {} at {}", dm[i] - d0[i] - m, i);
        }
    }

    #[test]
    fn gap_is_absolutely_homogeneous(x in dvec(65), lambda in -10.0..10.0f64, alpha in 0.01..1.0f64) {
        let op = DiscreteOperator::volterra(Grid::new(0.0, 1.0, 65).unwrap());
        let s = stabilization_gap(&op, &Stabilizer::ScalarAlpha, alpha, &x).unwrap();
        let sl = stabilization_gap(&op, &Stabilizer::ScalarAlpha, alpha, &(&x * lambda)).unwrap();
        prop_assert!((sl - lambda.abs() * s).abs() <= 1e-12 * (1.0 + lambda.abs() * s));
    }

    #[test]
    fn projected_rhs_is_psi_orthogonal(psi1 in dvec(6), psi2 in dvec(6), f in dvec(6)) {
        prop_assume!(psi1.norm() > 0.5 && psi2.norm() > 0.5);
        let cos = psi1.dot(&psi2) / (psi1.norm() * psi2.norm());
        prop_assume!(cos.abs() < 0.95);
        let phis = vec![psi1.clone(), psi2.clone()];
        let (basis, _) = build_stabilizer(phis, vec![psi1.clone(), psi2.clone()], None, None).unwrap();
        let p = project_rhs(&f, &basis).unwrap();
        for psi in [&psi1, &psi2] {
            prop_assert!(p.dot(psi).abs() <= 1e-10 * f.norm() * psi.norm());
        }
    }

    #[test]
    fn default_basis_satisfies_both_conditions(phi in dvec(5), psi in dvec(5)) {
        prop_assume!(phi.norm() > 1e-3 && psi.norm() > 1e-3);
        let (basis, _) = build_stabilizer(vec![phi.clone()], vec![psi.clone()], None, None).unwrap();
        prop_assert!(basis.phis[0].dot(&basis.gammas[0]).abs() > 0.0);
        prop_assert!((basis.zs[0].dot(&psi) - 1.0).abs() <= 1e-10);
    }
}

/// Symmetric positive semidefinite matrix with decaying spectrum, a discrete
/// stand-in for a compact first-kind operator.
fn smoothing_matrix(n: usize, rng: &mut impl FnMut() -> f64) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng());
    let q = g.qr().q();
    let spectrum = DVector::from_fn(n, |i, _| 0.9f64.powi(i as i32));
    &q * DMatrix::from_diagonal(&spectrum) * q.transpose()
}

fn lcg(seed: u64) -> impl FnMut() -> f64 {
    let mut s = seed;
    move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }
}

#[test]
fn perturbed_resolvent_estimate_holds() {
    for seed in 0..40u64 {
        let mut rng = lcg(seed);
        let n = 8 + (seed as usize % 24);
        let a = smoothing_matrix(n, &mut rng);
        let alpha = 0.05 + 0.2 * rng().abs();
        let shifted = &a + DMatrix::<f64>::identity(n, n) * alpha;
        let c = inverse_inf_norm(&shifted).unwrap();
        let e = DMatrix::from_fn(n, n, |_, _| rng());
        let delta = (0.9 / c) * rng().abs();
        let e = &e * (delta / inf_norm(&e));
        let q = delta * c;
        let c_tilde = inverse_inf_norm(&(shifted + e)).unwrap();
        assert!(c_tilde <= c / (1.0 - q) * (1.0 + 1e-12), "seed {seed}: {c_tilde} > {c}/(1-{q})");
    }
}

#[test]
fn residual_is_tiny_when_margin_below_one() {
    for seed in 0..20u64 {
        let mut rng = lcg(100 + seed);
        let n = 40;
        let a = DiscreteOperator::dense(smoothing_matrix(n, &mut rng)).unwrap();
        let f = DVector::from_fn(n, |_, _| rng());
        let cfg = RegConfig::new(1e-3, CoordinationRule::Fixed(0.1), 0.9).unwrap();
        let r = solve_perturbed(&a, &Stabilizer::ScalarAlpha, 0.1, &f, &cfg, None).unwrap();
        assert!(r.q_est < 1.0);
        assert!(r.residual_norm <= 1e-10 * f.amax());
    }
}
