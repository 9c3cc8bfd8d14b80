mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::RngExt;
use thetalift::automorphic::*;
use thetalift::special::quad::adaptive;
use thetalift::special::{bessel_k, v_functional, w_h, SpectralParam};
use thetalift::{GroupSpec, UpperHalfPoint};

fn t0() -> SpectralParam {
    SpectralParam::default_maass()
}

fn pt(x: f64, y: f64) -> UpperHalfPoint {
    UpperHalfPoint::new(x, y).unwrap()
}

fn finite(coeffs: &[(i64, f64)]) -> CoefficientSeries {
    CoefficientSeries::half_integral(t0(), coeffs.iter().copied())
        .unwrap()
        .with_tail_model(TailModel::Vanishing)
}

fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

#[test]
fn series_invariants_are_enforced() {
    assert!(CoefficientSeries::maass(t0(), [(1, 1.0), (2, -1.07)]).is_ok());
    assert!(matches!(
        CoefficientSeries::maass(t0(), [(1, 0.5)]),
        Err(AutomorphicError::InvalidSeries { invariant: "λ(1) = 1", .. })
    ));
    assert!(matches!(
        CoefficientSeries::half_integral(t0(), [(2, 1.0)]),
        Err(AutomorphicError::InvalidSeries { .. })
    ));
    // -3 ≡ 1 (mod 4)
    assert!(CoefficientSeries::half_integral(t0(), [(-3, 1.0), (-4, 2.0), (5, 0.1)]).is_ok());
    assert!(CoefficientSeries::half_integral(t0(), [(6, 0.0)]).is_ok());
    let s = CoefficientSeries::half_integral(t0(), [(8, 1.0)]).unwrap();
    assert_eq!(s.support_bound(), 8);
    assert!(s.clone().with_support_bound(7).is_err());
    assert_eq!(s.with_support_bound(100).unwrap().support_bound(), 100);
}

#[test]
fn maass_singleton_is_one_bessel_term() {
    let s = CoefficientSeries::maass(t0(), [(1, 1.0)]).unwrap().with_support_bound(40).unwrap();
    for (x, y) in [(0.1, 0.8), (0.37, 1.3), (-0.2, 2.5)] {
        let v = eval_maass(&s, &pt(x, y)).unwrap();
        let k = bessel_k(t0(), 2.0 * PI * y).unwrap();
        let expect = 2.0 * y.sqrt() * k * 2.0 * (2.0 * PI * x).cos();
        assert!((v - expect).abs() <= 1e-14 * expect.abs().max(1e-300), "{v} {expect}");
    }
}

#[test]
fn maass_parity() {
    let lam = [(1, 1.0), (2, -1.07), (3, -0.46), (5, 0.3)];
    let even = CoefficientSeries::maass(t0(), lam).unwrap().with_support_bound(60).unwrap();
    let odd = even.clone().with_parity(Parity::Odd).unwrap();
    for (x, y) in [(0.13, 0.9), (0.41, 1.7)] {
        let a = eval_maass(&even, &pt(x, y)).unwrap();
        let b = eval_maass(&even, &pt(-x, y)).unwrap();
        assert!((a - b).abs() <= 1e-15 * a.abs());
        let a = eval_maass(&odd, &pt(x, y)).unwrap();
        let b = eval_maass(&odd, &pt(-x, y)).unwrap();
        assert!((a + b).abs() <= 1e-15 * a.abs());
    }
}

#[test]
fn expansions_refuse_large_tails() {
    let s = CoefficientSeries::maass(t0(), [(1, 1.0), (2, 0.5)]).unwrap();
    assert!(matches!(
        eval_maass(&s, &pt(0.0, 0.01)),
        Err(AutomorphicError::TailTooLarge { .. })
    ));
    let h = CoefficientSeries::half_integral(t0(), [(1, 1.0), (4, 0.5)]).unwrap();
    assert!(matches!(
        eval_h_family(&h, HMember::H, &pt(0.0, 0.05)),
        Err(AutomorphicError::TailTooLarge { .. })
    ));
    assert!(eval_h_family(&h.with_support_bound(400).unwrap(), HMember::H, &pt(0.0, 0.05)).is_ok());
}

#[test]
fn h_singleton_is_w() {
    let s = finite(&[(1, 1.0)]);
    for y in [0.3, 1.0, 2.2] {
        let v = eval_h_family(&s, HMember::H, &pt(0.0, y)).unwrap().value;
        assert!((v - w_h(t0(), y).unwrap()).norm() <= 1e-15);
    }
}

#[test]
fn h_sharp_single_term() {
    let p = 5u64;
    let (n0, b) = (-3i64, 0.7);
    let s = finite(&[(p as i64 * n0, b)]);
    for (x, y) in [(0.2, 1.1), (3.7, 0.6)] {
        let expect = b / (n0.abs() as f64).sqrt()
            * w_h(t0(), n0 as f64 * y / p as f64).unwrap()
            * e(n0 as f64 * x / p as f64);
        for form in [SharpForm::Expansion, SharpForm::Average] {
            let v = eval_h_family(&s, HMember::Sharp { p, form }, &pt(x, y)).unwrap().value;
            assert!((v - expect).norm() <= 1e-13 * expect.norm(), "{form:?}: {v} {expect}");
        }
    }
}

/// `h_1(z) = e^{-πi/4}√2 h'((z+1)/16)` and `h_2(z) = e^{-πi/4}√2 h''((z+1/2)/4)`,
/// with `h'`, `h''` the master series restricted to `n ≡ 0`, `n ≡ 1 (mod 4)`.
#[test]
fn h_ell_matches_filtered_master_series() {
    let mut rng = common::rng(11);
    let s = common::random_half_series(&mut rng, 120);
    let filtered = |class: i64| {
        finite(
            &s.coefficients()
                .iter()
                .filter(|(n, _)| n.rem_euclid(4) == class)
                .map(|(n, b)| (*n, *b))
                .collect::<Vec<_>>(),
        )
    };
    let c = Complex64::from_polar(2f64.sqrt(), -PI / 4.0);
    let (f0, f1) = (filtered(0), filtered(1));
    for x in [-0.4, 0.0, 0.3, 1.7] {
        for y in [0.5, 1.0, 2.0] {
            let h1 = eval_h_family(&s, HMember::Ell(1), &pt(x, y)).unwrap().value;
            let o1 = c * eval_h_family(&f0, HMember::H, &pt((x + 1.0) / 16.0, y / 16.0)).unwrap().value;
            assert!((h1 - o1).norm() <= 1e-10, "h1 at {x}+{y}i: {h1} {o1}");
            let h2 = eval_h_family(&s, HMember::Ell(2), &pt(x, y)).unwrap().value;
            let o2 = c * eval_h_family(&f1, HMember::H, &pt((x + 0.5) / 4.0, y / 4.0)).unwrap().value;
            assert!((h2 - o2).norm() <= 1e-10, "h2 at {x}+{y}i: {h2} {o2}");
        }
    }
    assert!(eval_h_family(&s, HMember::Ell(3), &pt(0.0, 1.0)).is_err());
}

#[test]
fn up_identity_examples() {
    let z = pt(0.3, 2.0);
    let p = 5;
    let r = verify_up_identity(&finite(&[(5, 1.0)]), p, &z).unwrap();
    assert!(r.residual < 1e-12);
    let r = verify_up_identity(&finite(&[(8, 1.0)]), p, &z).unwrap();
    assert_eq!(r.rhs, Complex64::new(0.0, 0.0));
    assert!(r.lhs.norm() < 1e-12);
    let mut rng = common::rng(400);
    let s = common::random_half_series(&mut rng, 400);
    let r = verify_up_identity(&s, p, &z).unwrap();
    assert!(r.residual < 1e-9, "{r:?}");
    assert!(r.rhs.norm() > 1e-6);
    assert!(matches!(verify_up_identity(&s, 9, &z), Err(AutomorphicError::NotOddPrime(9))));
}

#[test]
fn up_identity_random_series() {
    let mut rng = common::rng(7);
    for p in [3u64, 5, 7, 11] {
        for _ in 0..6 {
            let max = rng.random_range(20..300);
            let s = common::random_half_series(&mut rng, max);
            for _ in 0..3 {
                let z = pt(rng.random_range(-2.0..2.0), rng.random_range(0.5..3.0));
                let r = verify_up_identity(&s, p, &z).unwrap();
                assert!(r.residual < 1e-9, "p = {p}, z = {z:?}: {r:?}");
            }
        }
    }
}

#[test]
fn ell_sharp_forms_agree() {
    let mut rng = common::rng(12);
    let s = common::random_half_series(&mut rng, 250);
    for p in [3u64, 5, 7] {
        for ell in [1u8, 2] {
            for (x, y) in [(0.1, 1.0), (2.3, 1.7), (-5.0, 3.0)] {
                let a = eval_h_family(&s, HMember::EllSharp { ell, p, form: SharpForm::Expansion }, &pt(x, y))
                    .unwrap()
                    .value;
                let b = eval_h_family(&s, HMember::EllSharp { ell, p, form: SharpForm::Average }, &pt(x, y))
                    .unwrap()
                    .value;
                assert!((a - b).norm() < 1e-10, "ℓ = {ell}, p = {p}: {a} {b}");
            }
        }
    }
}

#[test]
fn cusp_table_examples() {
    let d = cusp_data(5).unwrap();
    assert_eq!(d.iter().map(|c| c.width).collect::<Vec<_>>(), vec![5, 5, 20, 1, 1, 4]);
    assert_eq!(d.iter().map(|c| c.width).sum::<u64>(), 36);
    let names: Vec<String> = cusp_data(3).unwrap().iter().map(|c| c.cusp.to_string()).collect();
    assert_eq!(names, ["∞", "1/2", "1", "3/4", "3/2", "3"]);
    assert!(cusp_data(9).is_err());
}

#[test]
fn cusp_widths_sum_to_index() {
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        let d = cusp_data(p).unwrap();
        let expect = [p, p, 4 * p, 1, 1, 4];
        assert_eq!(d.iter().map(|c| c.width).collect::<Vec<_>>(), expect);
        // [SL₂(ℤ) : Γ₀(4p)] = 4p (3/2)(1 + 1/p), and -1 lies in the group
        assert_eq!(d.iter().map(|c| c.width).sum::<u64>(), 4 * p * 3 * (p + 1) / (2 * p));
        for c in &d {
            let [a, b, cc, dd] = c.representative;
            assert_eq!(a * dd - b * cc, 1);
            assert_eq!(width_by_formula(a, cc, p), c.width);
        }
    }
}

#[test]
fn fiber_counts_are_order_inverse_height() {
    let c = [0.1, 0.05]
        .iter()
        .map(|&y0| max_fiber_count(5, y0, 200, 40).0 as f64 * y0)
        .fold(0.0, f64::max);
    assert!(c > 0.0);
    for p in [7u64, 11] {
        for y0 in [0.1, 0.05] {
            let (m, w) = max_fiber_count(p, y0, 200, 40);
            assert!(m as f64 <= c / y0 + 1e-12, "p = {p}, y0 = {y0}: {m} at {w:?}");
        }
    }
    // the orbit of a point high up meets the strip once
    assert_eq!(fiber_count(5, &pt(1.3, 2.0), 0.1), 1);
}

fn bump(y: f64) -> f64 {
    if y <= 10.0 || y >= 12.0 {
        0.0
    } else {
        (-1.0 / ((y - 10.0) * (12.0 - y))).exp()
    }
}

#[test]
fn petersson_volume() {
    let pol = QuadraturePolicy::default();
    let one = |_: &UpperHalfPoint| 1.0;
    let env = |_: f64| 1.0;
    for spec in [GroupSpec::sl2z(), GroupSpec::new(4, 5).unwrap()] {
        let v = petersson_quadrature(one, Some(&env), spec, &pol).unwrap();
        assert!((v.value - PI / 3.0).abs() < 1e-6, "{spec:?}: {v:?}");
        assert!(v.tail_bound <= 1.1e-8);
    }
    assert!(matches!(
        petersson_quadrature(one, None, GroupSpec::sl2z(), &pol),
        Err(AutomorphicError::MissingEnvelope { .. })
    ));
    let short = QuadraturePolicy { cutoff: 10.0, ..pol };
    assert!(matches!(
        petersson_quadrature(one, Some(&env), GroupSpec::sl2z(), &short),
        Err(AutomorphicError::TailNotClosed { .. })
    ));
}

#[test]
fn petersson_bump_in_the_cusp() {
    let f = |z: &UpperHalfPoint| bump(thetalift::arith::htt(z).unwrap());
    let env = |y: f64| if y >= 12.0 { 0.0 } else { 1.0 };
    let v = petersson_quadrature(f, Some(&env), GroupSpec::sl2z(), &QuadraturePolicy::default()).unwrap();
    let cusp = adaptive(&|y: f64| bump(y) / (y * y), 10.0, 12.0, 1e-16);
    assert!((v.value - cusp).abs() < 1e-6 * cusp.max(1e-300) + 1e-12, "{} {cusp}", v.value);
    assert!(cusp > 1e-4);
    // every tile of Γ₀(4/3) sees the same bump
    let v3 = petersson_quadrature(f, Some(&env), GroupSpec::new(4, 3).unwrap(), &QuadraturePolicy::default())
        .unwrap();
    assert!((v3.value - cusp).abs() < 1e-6 * cusp);
}

#[test]
fn petersson_is_linear() {
    let pol = QuadraturePolicy { cutoff: 60.0, ..QuadraturePolicy::default() };
    let f = |z: &UpperHalfPoint| (-z.y).exp() * (1.0 + (2.0 * PI * z.x).cos());
    let g = |z: &UpperHalfPoint| (-0.5 * z.y).exp() / (1.0 + z.x * z.x);
    let env_f = |y: f64| 2.0 * (-y).exp();
    let env_g = |y: f64| (-0.5 * y).exp();
    let (a, b) = (0.7, -2.3);
    let spec = GroupSpec::new(4, 3).unwrap();
    let qf = petersson_quadrature(f, Some(&env_f), spec, &pol).unwrap().value;
    let qg = petersson_quadrature(g, Some(&env_g), spec, &pol).unwrap().value;
    let env = |y: f64| a * env_f(y) - b * env_g(y);
    let qs = petersson_quadrature(|z: &UpperHalfPoint| a * f(z) + b * g(z), Some(&env), spec, &pol)
        .unwrap()
        .value;
    assert!((qs - (a * qf + b * qg)).abs() < 1e-10, "{qs} {}", a * qf + b * qg);
}

#[test]
fn r_examples() {
    assert_eq!(compute_r(&finite(&[]), 5, 1.0).unwrap(), 0.0);
    let (p, t) = (5u64, 2.0);
    let r = compute_r(&finite(&[(5, 1.5), (13, 3.0)]), p, t).unwrap();
    let want = 2.25 * (1.0 + t / p as f64).powi(-100);
    assert!((r - want).abs() <= 1e-13 * want, "{r} {want}");
    assert!(compute_r(&finite(&[(5, 1.0)]), 5, 0.5).is_err());
}

#[test]
fn parseval_examples() {
    let pol = IntegralPolicy::default();
    let empty = compute_i_cusp(&finite(&[]), 5, 1.0, 1, &pol).unwrap();
    assert_eq!((empty.quadrature, empty.formula), (0.0, Some(0.0)));
    let r = compute_i_cusp(&finite(&[(5, 1.0)]), 5, 1.0, 1, &pol).unwrap();
    let expect = 5f64.sqrt() * v_functional(t0(), 0.2).unwrap();
    assert_eq!(r.formula, Some(expect));
    assert!((r.quadrature - expect).abs() < 1e-5 * expect, "{r:?}");
    assert_eq!(r.width, 5);
}

#[test]
fn parseval_random_series_at_three_cusps() {
    let mut rng = common::rng(2024);
    let pol = IntegralPolicy::default();
    for _ in 0..2 {
        let s = common::random_half_series(&mut rng, 160);
        for which in 1..=3 {
            let r = compute_i_cusp(&s, 5, 1.0, which, &pol).unwrap();
            let f = r.formula.unwrap();
            assert!(f > 0.0);
            assert!((r.quadrature - f).abs() < 1e-4 * f, "γ_{which}: {r:?}");
        }
    }
}

#[test]
fn small_width_cusps_by_quadrature() {
    let s = finite(&[(5, 1.0), (-20, 0.5)]);
    let pol = IntegralPolicy { levels: 24, ..IntegralPolicy::default() };
    for which in 4..=6 {
        let r = compute_i_cusp(&s, 5, 1.0, which, &pol).unwrap();
        assert!(r.formula.is_none());
        assert!(r.quadrature.is_finite() && r.quadrature > 0.0);
        assert!(r.quadrature_error < 1e-2 * r.quadrature, "{r:?}");
    }
    assert!(compute_i_cusp(&s, 5, 1.0, 7, &pol).is_err());
}

#[test]
fn i0_is_positive_and_additive() {
    let pol = QuadraturePolicy { x_panels: 2, s_width: 0.1, ..QuadraturePolicy::default() };
    let a = compute_i0(&finite(&[(5, 1.0)]), 5, 1.5, &pol).unwrap();
    let b = compute_i0(&finite(&[(5, 2.0)]), 5, 1.5, &pol).unwrap();
    assert!(a > 0.0);
    assert!((b - 4.0 * a).abs() < 1e-12 * b);
    assert_eq!(compute_i0(&finite(&[(9, 1.0)]), 5, 1.5, &pol).unwrap(), 0.0);
}

#[test]
fn quad_moment_examples() {
    let q = quad_moment_functional(&finite(&[]), 5, 1.0).unwrap();
    assert_eq!((q.log_weighted, q.v0_weighted), (0.0, 0.0));
    let q = quad_moment_functional(&finite(&[(5, 1.0)]), 5, 1.0).unwrap();
    assert!((q.log_weighted - (1.0 + 5f64.ln()) / 5.0).abs() < 1e-15);
    assert!(q.chain_holds);
    assert!(q.constants.u0 < (-1f64).exp());
    let mut rng = common::rng(5);
    for _ in 0..3 {
        let s = common::random_half_series(&mut rng, 200);
        let q = quad_moment_functional(&s, 5, rng.random_range(1.0..4.0)).unwrap();
        assert!(q.chain_holds && q.v0_weighted >= q.chain_lower, "{q:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn up_identity_holds_for_arbitrary_coefficients(
        coeffs in prop::collection::vec((-150i64..150, -2.0f64..2.0), 1..30),
        pi in 0usize..4,
        x in -3.0f64..3.0,
        y in 0.5f64..3.0,
    ) {
        let coeffs: Vec<(i64, f64)> =
            coeffs.into_iter().filter(|(n, _)| *n != 0 && n.rem_euclid(4) <= 1).collect();
        let s = finite(&coeffs);
        let p = [3u64, 5, 7, 11][pi];
        let r = verify_up_identity(&s, p, &pt(x, y)).unwrap();
        prop_assert!(r.residual < 1e-9);
    }

    #[test]
    fn h_sharp_is_p_periodic(x in -3.0f64..3.0, y in 0.5f64..2.0, seed in 0u64..1000) {
        let mut rng = common::rng(seed);
        let s = common::random_half_series(&mut rng, 60);
        let m = HMember::Sharp { p: 7, form: SharpForm::Average };
        let a = eval_h_family(&s, m, &pt(x, y)).unwrap().value;
        let b = eval_h_family(&s, m, &pt(x + 7.0, y)).unwrap().value;
        prop_assert!((a - b).norm() < 1e-11);
    }
}
