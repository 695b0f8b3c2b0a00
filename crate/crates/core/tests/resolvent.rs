use perturbreg::stable_diff::{
    regularized_derivative, resolvent_apply, resolvent_apply_with, resolvent_norm_bound, volterra_apply,
    BaselineChoice, Quadrature,
};
use perturbreg::GridFunction;

fn roundtrip_error(n: usize, alpha: f64, q: Quadrature) -> (f64, f64) {
    let x = GridFunction::from_fn(0.0, 3.0, n, f64::sin).unwrap();
    let ax = volterra_apply(&x);
    let g = x.with_values(ax.values().iter().zip(x.values()).map(|(i, v)| i + alpha * v).collect()).unwrap();
    let back = resolvent_apply_with(&g, alpha, q).unwrap().output;
    let err = back.values().iter().zip(x.values()).map(|(b, v)| (b - v).abs()).fold(0.0, f64::max);
    (err, x.h())
}

#[test]
fn roundtrip_is_second_order() {
    for q in [Quadrature::ProductTrapezoid, Quadrature::Trapezoid] {
        for alpha in [0.5, 0.1] {
            let (e1, h1) = roundtrip_error(257, alpha, q);
            let (e2, _) = roundtrip_error(513, alpha, q);
            let (e3, _) = roundtrip_error(1025, alpha, q);
            for ratio in [e1 / e2, e2 / e3] {
                assert!((ratio - 4.0).abs() <= 1.0, "{q:?} α={alpha}: ratio {ratio}");
            }
            if q == Quadrature::ProductTrapezoid {
                assert!(e1 <= 2.0 * h1 * h1, "α={alpha}: {e1}");
            }
        }
    }
}

/// Sup-norm of the discrete resolvent, i.e. its response to the worst sign vector.
fn discrete_resolvent_norm(n: usize, alpha: f64) -> f64 {
    let mut row_sums = vec![0.0; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = resolvent_apply(&GridFunction::new(0.0, 1.0, e).unwrap(), alpha).unwrap().output;
        for (s, c) in row_sums.iter_mut().zip(col.values()) {
            *s += c.abs();
        }
    }
    row_sums.into_iter().fold(0.0, f64::max)
}

#[test]
fn discrete_resolvent_norm_respects_bound() {
    for n in [33, 129, 513] {
        let h = 1.0 / (n - 1) as f64;
        for alpha in [1.0, 0.3, 0.1, 0.03, 0.01, 0.003] {
            let norm = discrete_resolvent_norm(n, alpha);
            let bound = resolvent_norm_bound(alpha, 0.0, 1.0);
            assert!(norm <= bound * (1.0 + h / alpha), "n={n} α={alpha}: {norm} vs {bound}");
        }
    }
}

/// `(y, y', sup |y''| on [0, 1])`
type Case = (fn(f64) -> f64, fn(f64) -> f64, f64);

#[test]
fn noise_free_bias_is_linear_in_alpha() {
    let polys: [Case; 3] = [
        (|t| t * t, |t| 2.0 * t, 2.0),
        (|t| 1.0 + t - t * t * t / 3.0, |t| 1.0 - t * t, 2.0),
        (|t| t * t * (1.0 - t), |t| 2.0 * t - 3.0 * t * t, 4.0),
    ];
    for (y, dy, curvature) in polys {
        for alpha in [0.2, 0.1, 0.05, 0.02] {
            let samples = GridFunction::from_fn(0.0, 1.0, 2001, y).unwrap();
            let r = regularized_derivative(&samples, alpha, BaselineChoice::Given { c: y(0.0), d: dy(0.0) }).unwrap();
            let err = samples
                .times()
                .zip(r.derivative.values())
                .map(|(t, d)| (d - dy(t)).abs())
                .fold(0.0, f64::max);
            assert!(err <= curvature * alpha + 1e-4, "α={alpha}: {err}");
        }
    }
}
