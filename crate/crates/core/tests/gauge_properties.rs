use std::f64::consts::PI;

use gaugeqm_core::gauge::{
    field_strength, gauge_transform_field, gauge_transform_field_hbar, pure_gauge, transform_covariance_check, wilson_line,
    wilson_line_hbar, Domain, GaugeField1D, GaugeTransform, LatticePath, TabulatedField,
};
use gaugeqm_core::lie::{su_basis, AlgebraElement, GroupElement};
use gaugeqm_core::linalg::{self, CMatrix};
use gaugeqm_core::random;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn t(k: usize) -> AlgebraElement {
    su_basis(2).unwrap().generators[k].clone()
}

/// Non-abelian, time-dependent `U = exp(θ₁(t, x) T₁) exp(θ₃(x) T₃)`.
fn twisted_transform() -> GaugeTransform {
    let a = GaugeTransform::abelian_spacetime(
        t(0),
        |tt, x| 0.8 * (x + 0.5 * tt).sin(),
        |tt, x| 0.4 * (x + 0.5 * tt).cos(),
        |tt, x| 0.8 * (x + 0.5 * tt).cos(),
    );
    let b = GaugeTransform::abelian(t(2), |x| 0.7 * (1.3 * x).cos(), |x| -0.91 * (1.3 * x).sin());
    a.compose(&b).unwrap()
}

fn curved_path(segments: usize) -> LatticePath {
    LatticePath::worldline(|s| 1.2 * (PI * s).sin() - 0.3 * s, 0.0, 1.5, segments).unwrap()
}

fn smooth_su2_field(seed: u64) -> GaugeField1D {
    random::smooth_field(&mut ChaCha8Rng::seed_from_u64(seed), 2, 3, 0.4, 8.0)
}

#[test]
fn pure_gauge_wilson_line_converges_to_endpoint_transforms() {
    let g = twisted_transform();
    let field = pure_gauge(&g).unwrap();
    let base = curved_path(16);
    let (ts, xs) = base.start();
    let (te, xe) = base.end();
    let want = g.u(te, xe).matrix() * g.u(ts, xs).matrix().adjoint();
    let errs: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|&k| linalg::max_abs_diff(wilson_line(&base.refine(k).unwrap(), &field).unwrap().matrix(), &want))
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 1.8, "order {order}, errors {errs:?}");
    }
    assert!(errs[2] < 1e-3);
}

#[test]
fn covariance_defect_is_second_order_for_time_dependent_transform() {
    let field = smooth_su2_field(7);
    let g = twisted_transform();
    let d: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| transform_covariance_check(&curved_path(n), &field, &g).unwrap())
        .collect();
    for w in d.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.8, "defects {d:?}");
    }
}

#[test]
fn hbar_scaled_transform_keeps_covariance() {
    let hbar = 0.37;
    let field = smooth_su2_field(8);
    let g = twisted_transform();
    let tf = gauge_transform_field_hbar(&field, &g, hbar).unwrap();
    let path = curved_path(400);
    let w = wilson_line_hbar(&path, &field, hbar).unwrap();
    let wt = wilson_line_hbar(&path, &tf, hbar).unwrap();
    let (ts, xs) = path.start();
    let (te, xe) = path.end();
    let predicted = g.u(te, xe).matrix() * w.matrix() * g.u(ts, xs).matrix().adjoint();
    assert!(linalg::max_abs_diff(wt.matrix(), &predicted) < 1e-4);
}

#[test]
fn abelian_wilson_line_is_exponential_of_line_integral() {
    // u(1): φ = i(1 + x t), A = i cos x along x = t², t ∈ [0, 1].
    let field = GaugeField1D::from_fns(
        1,
        |tt, x| CMatrix::from_element(1, 1, linalg::c(0.0, 1.0 + x * tt)),
        |_, x| CMatrix::from_element(1, 1, linalg::c(0.0, x.cos())),
        false,
    );
    // ∫ (1 + t³) dt + ∫ cos(t²) 2t dt = 1 + 1/4 + sin 1.
    let integral = 1.25 + 1.0f64.sin();
    let want = (linalg::c(0.0, -integral)).exp();
    let path = LatticePath::worldline(|s| s * s, 0.0, 1.0, 2000).unwrap();
    let w = wilson_line(&path, &field).unwrap();
    assert!((w.matrix()[(0, 0)] - want).norm() < 1e-6);
}

#[test]
fn reversed_spatial_path_gives_inverse() {
    let field = smooth_su2_field(9);
    let fwd = LatticePath::straight((0.3, -1.0), (0.3, 2.0), 50).unwrap();
    let rev = LatticePath::new(fwd.points().iter().rev().copied().collect()).unwrap();
    let w = wilson_line(&fwd, &field).unwrap();
    let wr = wilson_line(&rev, &field).unwrap();
    assert!(linalg::max_abs_diff(&(wr.matrix() * w.matrix()), &CMatrix::identity(2, 2)) < 1e-13);
}

#[test]
fn field_strength_transforms_by_conjugation() {
    let field = smooth_su2_field(10);
    let g = GaugeTransform::abelian(t(1), |x| 0.9 * x.sin(), |x| 0.9 * x.cos())
        .compose(&GaugeTransform::constant(GroupElement::exp(&t(0), 0.6).unwrap()))
        .unwrap();
    let tf = gauge_transform_field(&field, &g).unwrap();
    for &(tt, x) in &[(0.0, 0.1), (0.4, -1.7), (1.0, 2.5)] {
        let f = field_strength(&field, tt, x, 1e-4);
        let ft = field_strength(&tf, tt, x, 1e-4);
        let u = g.u(tt, x);
        let want = u.matrix() * f * u.matrix().adjoint();
        assert!(linalg::max_abs_diff(&ft, &want) < 1e-6);
    }
}

#[test]
fn constant_transform_leaves_no_derivative_terms() {
    let field = smooth_su2_field(11);
    let u = random::special_unitary(&mut ChaCha8Rng::seed_from_u64(3), 2);
    let tf = gauge_transform_field(&field, &GaugeTransform::constant(u.clone())).unwrap();
    let want = u.matrix() * field.a(0.2, 0.9).matrix() * u.matrix().adjoint();
    assert!(linalg::max_abs_diff(tf.a(0.2, 0.9).matrix(), &want) < 1e-14);
}

#[test]
fn tabulated_field_reproduces_bilinear_profiles() {
    let (p, a) = (t(0), t(2));
    let (p1, a1) = (p.clone(), a.clone());
    let exact = GaugeField1D::from_fns(
        2,
        move |tt, x| p1.scale(1.0 + 2.0 * x - tt + 0.5 * x * tt).into_matrix(),
        move |_, x| a1.scale(0.3 - x).into_matrix(),
        false,
    );
    let table = TabulatedField::sample(&exact, (0.0, 1.0), 3, (-2.0, 2.0), 9).unwrap();
    let tab = GaugeField1D::tabulated(table);
    for &(tt, x) in &[(0.1, -1.93), (0.77, 0.4), (0.5, 1.99)] {
        assert!(linalg::max_abs_diff(tab.phi(tt, x).matrix(), exact.phi(tt, x).matrix()) < 1e-13);
        assert!(linalg::max_abs_diff(tab.a(tt, x).matrix(), exact.a(tt, x).matrix()) < 1e-13);
    }
}

#[test]
fn finite_difference_transform_matches_analytic_one() {
    let analytic = twisted_transform();
    let a2 = analytic.clone();
    let numeric = GaugeTransform::from_fn(2, move |tt, x| a2.u(tt, x).matrix().clone(), Domain { t: (0.0, 2.0), x: (-3.0, 3.0) }, false);
    let field = smooth_su2_field(12);
    let fa = gauge_transform_field(&field, &analytic).unwrap();
    let fnum = gauge_transform_field(&field, &numeric).unwrap();
    assert!(linalg::max_abs_diff(fa.phi(0.3, 0.7).matrix(), fnum.phi(0.3, 0.7).matrix()) < 1e-7);
    assert!(linalg::max_abs_diff(fa.a(0.3, 0.7).matrix(), fnum.a(0.3, 0.7).matrix()) < 1e-7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wilson_line_composes_over_split(seed in any::<u64>(), segments in 2usize..60, frac in 0.0f64..1.0) {
        let field = smooth_su2_field(seed);
        let path = curved_path(segments);
        let idx = 1 + ((segments - 2) as f64 * frac) as usize;
        let (p1, p2) = path.split_at(idx).unwrap();
        let whole = wilson_line(&path, &field).unwrap();
        let parts = wilson_line(&p2, &field).unwrap().matrix() * wilson_line(&p1, &field).unwrap().matrix();
        prop_assert!(linalg::max_abs_diff(whole.matrix(), &parts) < 1e-12);
        prop_assert!(linalg::unitarity_defect(whole.matrix()) < 1e-12);
    }

    #[test]
    fn transformed_fields_stay_in_the_algebra(seed in any::<u64>(), tt in -1.0f64..1.0, x in -3.0f64..3.0) {
        let field = smooth_su2_field(seed);
        let tf = gauge_transform_field(&field, &twisted_transform()).unwrap();
        prop_assert!(linalg::anti_hermitian_defect(tf.phi(tt, x).matrix()) < 1e-12);
        prop_assert!(linalg::anti_hermitian_defect(tf.a(tt, x).matrix()) < 1e-12);
    }
}
