//! Property tests for the geometric and algebraic building blocks.

use logconcave_core::bodies::SymmetricBody;
use logconcave_core::linalg::{expm_symmetric, inverse, jacobi_eigen, Matrix};
use logconcave_core::quadrature::{integrate, measure, QuadratureSpec, RestrictedMeasure, SphereRule};
use logconcave_core::rng::SeededRng;
use logconcave_core::testfns::{random_polynomial, Parity, TestFunction};
use logconcave_core::weights::{CurvatureOperator, RadialWeight};
use proptest::prelude::*;

fn bodies() -> Vec<SymmetricBody> {
    vec![
        SymmetricBody::ball(2).unwrap(),
        SymmetricBody::square(),
        SymmetricBody::diamond(),
        SymmetricBody::hexagon(),
        SymmetricBody::ellipse(),
        SymmetricBody::lq_ball(2, 3.0, 1.0).unwrap(),
    ]
}

fn weights() -> Vec<RadialWeight> {
    vec![
        RadialWeight::power(0.5).unwrap(),
        RadialWeight::power(1.0).unwrap(),
        RadialWeight::gaussian(),
        RadialWeight::power(4.0).unwrap(),
        RadialWeight::cauchy(1.5, 2.0).unwrap(),
        RadialWeight::cauchy(3.0, 2.0).unwrap(),
    ]
}

fn symmetric(n: usize, entries: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = entries[k];
            m[(j, i)] = entries[k];
            k += 1;
        }
    }
    m
}

/// Eigenvalues of a symmetric 3×3 matrix from its characteristic polynomial
/// (trigonometric form of the cubic roots).
fn cubic_eigenvalues(a: &Matrix) -> [f64; 3] {
    let q = a.trace() / 3.0;
    let p1 = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
    let p2 = (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return [q; 3];
    }
    let b = a.sub(&Matrix::identity(3).scale(q)).scale(1.0 / p);
    let det = b[(0, 0)] * (b[(1, 1)] * b[(2, 2)] - b[(1, 2)] * b[(2, 1)]) - b[(0, 1)] * (b[(1, 0)] * b[(2, 2)] - b[(1, 2)] * b[(2, 0)])
        + b[(0, 2)] * (b[(1, 0)] * b[(2, 1)] - b[(1, 1)] * b[(2, 0)]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let mut out = [l3, 3.0 * q - l1 - l3, l1];
    out.sort_by(f64::total_cmp);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_reconstructs(n in 2usize..8, seed in 0u64..1000) {
        let mut rng = SeededRng::new(seed);
        let entries: Vec<f64> = (0..n * (n + 1) / 2).map(|_| rng.normal()).collect();
        let a = symmetric(n, &entries);
        let eig = jacobi_eigen(&a).unwrap();
        prop_assert!(eig.reconstruct().sub(&a).max_abs() < 1e-10);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn jacobi_matches_characteristic_polynomial(e in proptest::collection::vec(-5.0f64..5.0, 6)) {
        let a = symmetric(3, &e);
        let eig = jacobi_eigen(&a).unwrap();
        let oracle = cubic_eigenvalues(&a);
        for (x, y) in eig.values.iter().zip(oracle) {
            prop_assert!((x - y).abs() < 1e-8, "{:?} vs {:?}", eig.values, oracle);
        }
    }

    #[test]
    fn gauge_is_homogeneous_and_dual_to_support(k in 0usize..6, x0 in -3.0f64..3.0, x1 in -3.0f64..3.0, c in 0.1f64..10.0, a in 0.0f64..6.3) {
        let body = &bodies()[k];
        let x = [x0, x1];
        let g = body.gauge(&x);
        prop_assert!((body.gauge(&[c * x0, c * x1]) - c * g).abs() < 1e-12 * (1.0 + c * g));
        prop_assert!((body.gauge(&[-x0, -x1]) - g).abs() < 1e-12 * (1.0 + g));
        let u = [a.cos(), a.sin()];
        prop_assert!(x0 * u[0] + x1 * u[1] <= g * body.support(&u) + 1e-10);
        // The radial function inverts the gauge along unit directions.
        prop_assert!((body.gauge(&u) * body.radial(&u) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn linear_images_transport_the_gauge(k in 0usize..6, e in proptest::collection::vec(-1.0f64..1.0, 4), x0 in -2.0f64..2.0, x1 in -2.0f64..2.0) {
        let t = Matrix::from_rows(&[&[2.0 + e[0], e[1]], &[e[2], 2.0 + e[3]]]).unwrap();
        let body = bodies()[k].clone();
        let image = SymmetricBody::linear_image(t.clone(), body.clone()).unwrap();
        let tx = t.mul_vec(&[x0, x1]);
        prop_assert!((image.gauge(&tx) - body.gauge(&[x0, x1])).abs() < 1e-9 * (1.0 + body.gauge(&[x0, x1])));
    }

    #[test]
    fn exponential_images_compose(e in proptest::collection::vec(-1.0f64..1.0, 3), s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let a = symmetric(2, &e);
        let lhs = expm_symmetric(&a, s + t).unwrap();
        let rhs = expm_symmetric(&a, s).unwrap().matmul(&expm_symmetric(&a, t).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).max_abs() < 1e-12 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn polygon_sums_add_support_functions(i in 0usize..3, j in 0usize..3, lambda in 0.0f64..1.0, a in 0.0f64..6.3) {
        let polys = [SymmetricBody::square(), SymmetricBody::diamond(), SymmetricBody::hexagon()];
        let comb = SymmetricBody::minkowski_comb(lambda, polys[i].clone(), polys[j].clone()).unwrap();
        prop_assert!(comb.as_polygon().is_some());
        let u = [a.cos(), a.sin()];
        let expected = (1.0 - lambda) * polys[i].support(&u) + lambda * polys[j].support(&u);
        prop_assert!((comb.support(&u) - expected).abs() < 1e-12);
    }

    #[test]
    fn rank_one_inverse_matches_dense(k in 0usize..6, x0 in -4.0f64..4.0, x1 in -4.0f64..4.0, y0 in -2.0f64..2.0, y1 in -2.0f64..2.0) {
        prop_assume!(x0.abs() + x1.abs() > 1e-3);
        let w = &weights()[k];
        let op = CurvatureOperator::new(w, &[x0, x1]).unwrap();
        let dense = inverse(&op.to_matrix()).unwrap().mul_vec(&[y0, y1]);
        let mut fast = [0.0; 2];
        op.apply_inverse(&[y0, y1], &mut fast).unwrap();
        let scale = 1.0 + dense.iter().map(|v| v.abs()).fold(0.0, f64::max);
        prop_assert!((fast[0] - dense[0]).abs() < 1e-10 * scale && (fast[1] - dense[1]).abs() < 1e-10 * scale);
    }

    #[test]
    fn polynomial_gradients_match_differences(seed in 0u64..500, odd in any::<bool>(), x0 in -2.0f64..2.0, x1 in -2.0f64..2.0) {
        let mut rng = SeededRng::new(seed);
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let f = random_polynomial(&mut rng, parity, 4, 2, seed % 2 == 0).unwrap();
        let mut g = [0.0; 2];
        f.gradient(&[x0, x1], &mut g);
        let h = 1e-6;
        let d0 = (f.value(&[x0 + h, x1]) - f.value(&[x0 - h, x1])) / (2.0 * h);
        let d1 = (f.value(&[x0, x1 + h]) - f.value(&[x0, x1 - h])) / (2.0 * h);
        prop_assert!((g[0] - d0).abs() < 1e-6 * (1.0 + d0.abs()));
        prop_assert!((g[1] - d1).abs() < 1e-6 * (1.0 + d1.abs()));
        let sign = if odd { -1.0 } else { 1.0 };
        let v = f.value(&[x0, x1]);
        prop_assert!((f.value(&[-x0, -x1]) - sign * v).abs() < 1e-12 * (1.0 + v.abs()));
    }

    #[test]
    fn composition_keeps_parity(seed in 0u64..500, e in proptest::collection::vec(-1.0f64..1.0, 4)) {
        let mut rng = SeededRng::new(seed);
        let f = random_polynomial(&mut rng, Parity::Odd, 3, 2, false).unwrap();
        let m = Matrix::from_rows(&[&[1.5 + e[0], e[1]], &[e[2], 1.5 + e[3]]]).unwrap();
        let g = f.composed(m).unwrap();
        prop_assert_eq!(g.parity(), Parity::Odd);
        prop_assert!(g.require_parity(Parity::Odd).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn measures_grow_with_dilation(k in 0usize..6, w in 0usize..6, c in 1.01f64..3.0) {
        let spec = QuadratureSpec::default_for(2).with_panels(16, 8);
        let body = bodies()[k].clone();
        let weight = weights()[w].clone();
        let small = RestrictedMeasure::restricted(weight.clone(), body.clone()).unwrap();
        let large = RestrictedMeasure::restricted(weight.clone(), SymmetricBody::dilate(c, body).unwrap()).unwrap();
        let (ms, ml) = (measure(&small, &spec).unwrap().value, measure(&large, &spec).unwrap().value);
        prop_assert!(ms > 0.0 && ms < ml);
        // The density is at most its supremum e^{-w(0+)} ≤ 1 here, so
        // μ(cK) ≤ area(cK).
        if let Some(p) = bodies()[k].as_polygon() {
            prop_assert!(ml <= c * c * p.area() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn odd_functions_integrate_to_zero(k in 0usize..6, seed in 0u64..100) {
        let spec = QuadratureSpec::default_for(2).with_panels(16, 8);
        let nu = RestrictedMeasure::restricted(RadialWeight::power(1.0).unwrap(), bodies()[k].clone()).unwrap();
        let mut rng = SeededRng::new(seed);
        let f = random_polynomial(&mut rng, Parity::Odd, 5, 2, false).unwrap();
        let scale = integrate(&nu, &TestFunction::radial_power(2, 5.0).unwrap(), &spec).unwrap().value;
        prop_assert!(integrate(&nu, &f, &spec).unwrap().value.abs() < 1e-12 * (1.0 + scale) * 50.0);
    }
}

#[test]
fn rank_one_inverse_thousand_points() {
    let mut rng = SeededRng::new(7);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let w = &weights()[k % 6];
        let x = [rng.uniform_in(-5.0, 5.0), rng.uniform_in(-5.0, 5.0)];
        let y = [rng.normal(), rng.normal()];
        let op = CurvatureOperator::new(w, &x).unwrap();
        let dense = inverse(&op.to_matrix()).unwrap().mul_vec(&y);
        let mut fast = [0.0; 2];
        op.apply_inverse(&y, &mut fast).unwrap();
        let scale = 1.0 + dense.iter().map(|v| v.abs()).fold(0.0, f64::max);
        worst = worst.max((fast[0] - dense[0]).abs().max((fast[1] - dense[1]).abs()) / scale);
    }
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn three_dimensional_rules_agree() {
    // Product Gauss and Monte Carlo sphere rules on the same 3-D measure.
    let nu = RestrictedMeasure::restricted(RadialWeight::gaussian(), SymmetricBody::ball(3).unwrap()).unwrap();
    let gauss = measure(&nu, &QuadratureSpec::default_for(3)).unwrap();
    let mc_spec = QuadratureSpec::default_for(3).with_sphere(SphereRule::MonteCarlo { samples: 20_000, seed: 3 });
    let mc = measure(&nu, &mc_spec).unwrap();
    // The Gaussian ball is rotation invariant, so every direction carries
    // the same radial integral and the Monte Carlo rule is exact too.
    assert!((gauss.value - mc.value).abs() < 1e-10 * gauss.value);
}
