mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::RngExt;
use thetalift::arith::{coset_reps, htt, rat, Mat2, UpperHalfPoint};
use thetalift::lattices::{GramData, LatticeSpec, PreparedBasis};
use thetalift::metaplectic::theta_multiplier;
use thetalift::theta::*;

fn pt(x: f64, y: f64) -> UpperHalfPoint {
    UpperHalfPoint::new(x, y).unwrap()
}

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

#[test]
fn jacobi_theta_reference_and_periodicity() {
    // direct sum of 1 + 2Σ e^{-2πn²} to n = 40
    let direct = 1.0 + 2.0 * (1..=40).map(|n| (-2.0 * PI * (n * n) as f64).exp()).sum::<f64>();
    let v = jacobi_theta(&UpperHalfPoint::i(), &pol()).unwrap();
    assert!((v.value - Complex64::new(direct, 0.0)).norm() < 1e-14);
    let mut r = common::rng(1);
    for _ in 0..50 {
        let z = common::random_point(&mut r, 0.05, 3.0);
        let a = jacobi_theta(&z, &pol()).unwrap().value;
        let b = jacobi_theta(&z.translate(1.0), &pol()).unwrap().value;
        assert!((a - b).norm() < 1e-14);
    }
}

#[test]
fn jacobi_theta_height_bound() {
    let c = jacobi_theta(&pt(0.0, 10.0), &pol()).unwrap().value.norm() / 10f64.powf(0.25);
    let mut r = common::rng(2);
    for _ in 0..1000 {
        let y0 = 10f64.powf(r.random_range(-0.06..4.0));
        let z0 = pt(r.random_range(-0.5..0.5), y0.max(1.0));
        let g = common::random_sl2z(&mut r, 6);
        let z = g.act(&z0);
        let h = htt(&z).unwrap();
        let v = jacobi_theta(&z, &pol()).unwrap().value.norm();
        assert!(v <= 1.05 * c * h.powf(0.25), "z = {z:?}: {v} vs {}", c * h.powf(0.25));
    }
}

#[test]
fn multiplier_matches_theta_quotient() {
    let mut r = common::rng(3);
    for _ in 0..40 {
        let g = common::random_gamma04(&mut r, 12);
        for (_, z) in published_grid() {
            assert!(multiplier_residual(&g, &z, &pol()).unwrap() < 1e-8, "{g}");
        }
    }
}

#[test]
fn kernel_factorization() {
    let mut r = common::rng(4);
    for _ in 0..20 {
        let w = common::random_point(&mut r, 0.5, 2.0);
        let z = common::random_point(&mut r, 0.5, 2.0);
        // moderate P keeps the rounding of P below 1e-13 relative after exp
        let m: i64 = r.random_range(-2..=2);
        let beta = Mat2::from_ints(r.random_range(-2..=2), 2 * r.random_range(-1..=1), 2 * r.random_range(-1..=1), 0);
        let beta = Mat2::new(beta.a.clone(), beta.b.clone(), beta.c.clone(), -beta.a.clone());
        let alpha = Mat2::scalar(rat(m, 1)).add(&beta);
        let lhs = phi(&w, &w, &z, &alpha);
        let e = Complex64::new(0.0, 2.0 * PI * (m * m) as f64) * z.to_complex();
        let rhs = z.y.powf(0.25) * e.exp() * phi0(&w, &z, &beta).unwrap();
        assert!((lhs - rhs).norm() <= 1e-13 * lhs.norm().max(1e-300), "{alpha}");
    }
    // α = 2I + 2 diag(1,-1)
    let w = pt(0.2, 1.3);
    let z = pt(-0.1, 0.6);
    let lhs = phi(&w, &w, &z, &Mat2::from_ints(4, 0, 0, 0));
    let rhs = z.y.powf(0.25)
        * (Complex64::new(0.0, 8.0 * PI) * z.to_complex()).exp()
        * phi0(&w, &z, &Mat2::from_ints(2, 0, 0, -2)).unwrap();
    assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
}

#[test]
fn kernel_quarter_shift() {
    let mut r = common::rng(5);
    for _ in 0..20 {
        let (w1, w2, z) = (
            common::random_point(&mut r, 0.5, 2.0),
            common::random_point(&mut r, 0.5, 2.0),
            common::random_point(&mut r, 0.5, 2.0),
        );
        let p: i64 = [3, 5, 7][r.random_range(0..3)];
        let j: i64 = r.random_range(0..4);
        let alpha = Mat2::new(rat(r.random_range(-4..=4), 1), rat(r.random_range(-4..=4), p), rat(r.random_range(-4..=4), 1), rat(r.random_range(-4..=4), 1));
        let zq = pt((z.x + (p * j) as f64) / 4.0, z.y / 4.0);
        let lhs = phi(&w1, &w2, &zq, &alpha);
        let det = alpha.det();
        let ph = (rat(p * j, 4) * det).to_f64();
        let half = alpha.scale(&rat(1, 2));
        let rhs = 0.25 * Complex64::from_polar(1.0, 2.0 * PI * ph) * phi(&w1, &w2, &z, &half);
        assert!((lhs - rhs).norm() <= 1e-13 * lhs.norm().max(1e-300));
    }
}

trait ToF64 {
    fn to_f64(&self) -> f64;
}
impl ToF64 for num_rational::BigRational {
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap()
    }
}

/// `Σ` over the coordinate box `|m_i| ≤ r_i` of a basis.
fn box_sum(basis: &GramData, radii: &[i64], f: impl Fn(&Mat2) -> Complex64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut idx: Vec<i64> = radii.iter().map(|r| -r).collect();
    loop {
        total += f(&basis.combine(&idx));
        let mut k = 0;
        loop {
            if k == idx.len() {
                return total;
            }
            idx[k] += 1;
            if idx[k] <= radii[k] {
                break;
            }
            idx[k] = -radii[k];
            k += 1;
        }
    }
}

#[test]
fn kernel_matches_box_sum() {
    let i = UpperHalfPoint::i();
    let s0 = thetalift::lattices::basis(&LatticeSpec::s0(1, 1)).unwrap();
    let brute = box_sum(&s0, &[12, 6, 6], |a| phi0(&i, &i, a).unwrap());
    let v = theta_kernel(&i, &i, &pol()).unwrap();
    assert!((v.value - brute).norm() < 1e-10);
    let s = thetalift::lattices::basis(&LatticeSpec::s(1, 1)).unwrap();
    let brute = box_sum(&s, &[6, 3, 3, 6], |a| phi(&i, &i, &i, a));
    let v = theta_lattice(&LatticeSpec::s(1, 1), &i, &i, &i, &pol()).unwrap();
    assert!((v.value - brute).norm() < 1e-10);
}

#[test]
fn kernel_transforms_in_z_and_is_invariant_in_w() {
    let mut r = common::rng(6);
    for (w, z) in published_grid() {
        let base = theta_kernel(&w, &z, &pol()).unwrap().value;
        assert!((theta_kernel(&w, &z.translate(1.0), &pol()).unwrap().value - base).norm() < 1e-12);
        for g in [Mat2::from_ints(1, 0, 4, 1), Mat2::from_ints(1, 0, -4, 1), Mat2::from_ints(-3, 1, -4, 1)] {
            let gz = g.act(&z);
            let v = theta_kernel(&w, &gz, &pol()).unwrap().value * theta_multiplier(&g, &z).unwrap();
            assert!((v - base).norm() < 1e-8, "γ = {g}");
        }
        let g = common::random_sl2z(&mut r, 5);
        let v = theta_kernel(&g.act(&w), &z, &pol()).unwrap().value;
        assert!((v - base).norm() < 1e-9);
    }
}

#[test]
fn lattice_sum_limit_and_basis_independence() {
    let w1 = pt(0.1, 1.2);
    let w2 = pt(-0.3, 0.8);
    let spec = LatticeSpec::r(3, 5);
    let y = 400.0;
    let v = theta_lattice(&spec, &w1, &w2, &pt(0.2, y), &pol()).unwrap().value;
    assert!((v * 2.0 * PI / y - 1.0).norm() < 1e-9);

    let g = thetalift::lattices::basis(&spec).unwrap();
    let e = &g.basis;
    // unimodular change: e0 + 2e1 - e3, e1 + e2, e2, e3 - 3e2
    let other = GramData::from_basis(vec![
        e[0].add(&e[1].scale(&rat(2, 1))).sub(&e[3]),
        e[1].add(&e[2]),
        e[2].clone(),
        e[3].sub(&e[2].scale(&rat(3, 1))),
    ]);
    let z = pt(0.15, 0.7);
    let a = theta_lattice(&spec, &w1, &w2, &z, &pol()).unwrap().value;
    let prepared = PreparedBasis::new(other).unwrap();
    let b = LatticeSum { basis: &prepared, w1, w2, z, shift: (0, 1), y_power: 1.0 }
        .evaluate(&pol())
        .unwrap()
        .value;
    assert!((a - b).norm() < 1e-12);
}

#[test]
fn theta_sharp_is_deterministic_and_representative_free() {
    let i = UpperHalfPoint::i();
    let a = theta_sharp(&i, &i, 3, &pol()).unwrap();
    let b = theta_sharp(&i, &i, 3, &pol()).unwrap();
    assert_eq!(a.value, b.value);
    for p in [3u64, 5] {
        let (w, z) = published_grid()[3];
        let reps = coset_reps(p).unwrap();
        let delta = Mat2::from_ints(1, 0, p as i64, 1).mul(&Mat2::from_ints(1, 2, 0, 1));
        let moved: Vec<Mat2> = reps.iter().map(|g| delta.mul(g)).collect();
        let x = theta_sharp_with_reps(&w, &z, p, &reps, &pol()).unwrap().value;
        let y = theta_sharp_with_reps(&w, &z, p, &moved, &pol()).unwrap().value;
        assert!((x - y).norm() < 1e-10, "p = {p}");
    }
    assert!(theta_sharp(&i, &i, 9, &pol()).is_err());
}

#[test]
fn identity_examples() {
    let i = UpperHalfPoint::i();
    let c = verify_identity(Identity::Pushforward, 3, &i, &i, &pt(0.0, 2.0), &pol()).unwrap();
    assert!(c.residual < 1e-7);
    let c = verify_identity(Identity::Fricke, 5, &i, &i, &pt(1.0, 1.0), &pol()).unwrap();
    assert!(c.residual < 1e-7);
    let c = verify_identity(Identity::Mod4Split, 3, &pt(0.31, 0.77), &pt(-0.12, 1.4), &i, &pol()).unwrap();
    assert!(c.residual < 1e-7);
}

#[test]
fn residuals_are_truncation_dominated() {
    let (w, z) = published_grid()[2];
    let w2 = second_point(&w);
    for which in Identity::ALL {
        let mut last = f64::INFINITY;
        for target in [1e-3, 1e-6, 1e-9] {
            let c = verify_identity(which, 3, &w, &w2, &z, &TruncationPolicy::with_target(target)).unwrap();
            assert!(c.residual <= c.tail + 1e-12, "{} at {target}: {} > {}", which.name(), c.residual, c.tail);
            assert!(c.tail < last);
            last = c.tail;
        }
    }
}

#[test]
fn truncation_cap_is_reported() {
    let tiny = TruncationPolicy { target_abs_error: 1e-12, max_bound: 10.0 };
    assert!(matches!(jacobi_theta(&pt(0.0, 1e-4), &tiny), Err(ThetaError::CapReached { .. })));
    assert!(matches!(
        theta_kernel(&UpperHalfPoint::i(), &pt(0.0, 0.01), &tiny),
        Err(ThetaError::CapReached { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn doubling_the_bound_stays_within_tail(x in -0.5f64..0.5, y in 0.4f64..2.0, wx in -0.5f64..0.5, wy in 0.6f64..2.0) {
        let (w, z) = (pt(wx, wy), pt(x, y));
        let a = theta_lattice(&LatticeSpec::s(1, 3), &w, &w, &z, &TruncationPolicy::with_target(1e-8)).unwrap();
        let b = theta_lattice(&LatticeSpec::s(1, 3), &w, &w, &z, &TruncationPolicy::with_target(1e-14)).unwrap();
        prop_assert!((a.value - b.value).norm() <= a.tail_bound + b.tail_bound);
        prop_assert!(b.bound > a.bound);
    }

    #[test]
    fn lattice_sum_is_periodic_under_integer_determinant_shifts(x in -0.5f64..0.5, y in 0.4f64..2.0) {
        // det on S(1/1) is integral
        let i = UpperHalfPoint::i();
        let a = theta_lattice(&LatticeSpec::s(1, 1), &i, &i, &pt(x, y), &pol()).unwrap().value;
        let b = theta_lattice_shifted(&LatticeSpec::s(1, 1), &i, &i, &pt(x, y), (1, 1), &pol()).unwrap().value;
        prop_assert!((a - b).norm() < 1e-13);
        // det on S(1/3) lies in (1/3)ℤ: period 3
        let c = theta_lattice(&LatticeSpec::s(1, 3), &i, &i, &pt(x, y), &pol()).unwrap().value;
        let d = theta_lattice_shifted(&LatticeSpec::s(1, 3), &i, &i, &pt(x, y), (3, 1), &pol()).unwrap().value;
        prop_assert!((c - d).norm() < 1e-13);
    }
}
