//! The weight 1/2 automorphy factor `J(γ, z)` on `Γ₀(4)`, the twisting
//! factor `η(j)` and the matrix identity used to move `h♯` between cusps.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use crate::arith::{
    epsilon_d, in_group, kronecker, kronecker_i64, rat, ArithError, FourthRoot, GroupSpec, Mat2,
    UpperHalfPoint,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetaplecticError {
    #[error("{0} is not in Γ₀(4)")]
    NotInGamma04(String),
    #[error("{0} is not an odd prime ≥ 3")]
    NotOddPrime(i64),
    #[error("j = {j} is outside [1, {p}-1]")]
    BadResidue { j: i64, p: i64 },
    #[error("no witness found for j = {j}, p = {p}")]
    NoWitness { j: i64, p: i64 },
    #[error("witness check failed: {0}")]
    WitnessCheck(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `J(γ, z)` split into its exact and floating parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplierValue {
    pub eps: FourthRoot,
    pub sqrt_factor: Complex64,
}

impl MultiplierValue {
    pub fn value(&self) -> Complex64 {
        self.eps.to_complex() * self.sqrt_factor
    }
}

pub(crate) fn is_odd_prime(p: i64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut q = 3;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 2;
    }
    true
}

/// `ε(γ) = ε_d⁻¹ (c/d)` for `γ = (a,b;c,d) ∈ Γ₀(4)`.
pub fn epsilon_gamma(g: &Mat2) -> Result<FourthRoot, MetaplecticError> {
    if !in_group(g, &GroupSpec::gamma0(4)) {
        return Err(MetaplecticError::NotInGamma04(g.to_string()));
    }
    let [_, _, c, d] = g.int_entries().expect("group elements are integral");
    let sym = kronecker(&c, &d)?;
    Ok(epsilon_d(&d)?.inv() * FourthRoot::from_sign(sym))
}

/// `√(cz+d)/|cz+d|^{1/2}` with `arg ∈ (-π, π]`.
fn sqrt_phase(c: f64, d: f64, z: &UpperHalfPoint) -> Complex64 {
    let re = c.mul_add(z.x, d);
    let im = c * z.y;
    let arg = if im == 0.0 && re < 0.0 { std::f64::consts::PI } else { im.atan2(re) };
    Complex64::from_polar(1.0, arg / 2.0)
}

pub fn multiplier(g: &Mat2, z: &UpperHalfPoint) -> Result<MultiplierValue, MetaplecticError> {
    let eps = epsilon_gamma(g)?;
    let [_, _, c, d] = g.to_f64();
    Ok(MultiplierValue { eps, sqrt_factor: sqrt_phase(c, d, z) })
}

/// `J(γ, z) = ε(γ) √(cz+d)/|cz+d|^{1/2}`.
pub fn theta_multiplier(g: &Mat2, z: &UpperHalfPoint) -> Result<Complex64, MetaplecticError> {
    Ok(multiplier(g, z)?.value())
}

/// `|J(g₁g₂, z) - J(g₁, g₂z) J(g₂, z)|`.
pub fn cocycle_residual(g1: &Mat2, g2: &Mat2, z: &UpperHalfPoint) -> Result<f64, MetaplecticError> {
    let lhs = theta_multiplier(&g1.mul(g2), z)?;
    let rhs = theta_multiplier(g1, &g2.act(z))? * theta_multiplier(g2, z)?;
    Ok((lhs - rhs).norm())
}

/// The witnesses `γ, δ` behind `η(j)` and both evaluations of `η(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaWitness {
    pub j: i64,
    pub p: i64,
    pub gamma: Mat2,
    pub delta: Mat2,
    /// `ε(γ) conj(ε(δ))`.
    pub eta: FourthRoot,
    /// `ε_p (-j/p)`.
    pub closed_form: FourthRoot,
}

fn check_prime_residue(j: i64, p: i64) -> Result<(), MetaplecticError> {
    if !is_odd_prime(p) {
        return Err(MetaplecticError::NotOddPrime(p));
    }
    if j < 1 || j >= p {
        return Err(MetaplecticError::BadResidue { j, p });
    }
    Ok(())
}

/// `η(j)` via the first witness of the deterministic search.
pub fn eta_factor(j: i64, p: i64) -> Result<EtaWitness, MetaplecticError> {
    eta_factor_with_skip(j, p, 0)
}

/// `η(j)` via the witness obtained after skipping `skip` admissible values
/// of `d`; used to confirm the value does not depend on the witness.
pub fn eta_factor_with_skip(j: i64, p: i64, skip: usize) -> Result<EtaWitness, MetaplecticError> {
    check_prime_residue(j, p)?;
    let jinv = j.extended_gcd(&p).x.rem_euclid(p);
    let target = (-jinv).rem_euclid(p);
    // smallest c > 0 with c ≡ -j⁻¹ (mod p) and 4 | c
    let c = (1..=4 * p)
        .find(|c| c % 4 == 0 && c % p == target)
        .ok_or(MetaplecticError::NoWitness { j, p })?;
    let pc = p * c;
    let d = (0..100_000i64)
        .map(|k| 1 + 4 * p * k)
        .filter(|d| d.gcd(&pc) == 1)
        .nth(skip)
        .ok_or(MetaplecticError::NoWitness { j, p })?;
    let e = d.extended_gcd(&pc);
    let (a, b) = (e.x, -e.y);
    let gamma = Mat2::from_ints(a, b, pc, d);
    if !gamma.is_unimodular() || !in_group(&gamma, &GroupSpec::gamma0(4)) {
        return Err(MetaplecticError::WitnessCheck(format!("γ = {gamma}")));
    }
    let n = Mat2::new(rat(1, 1), rat(j, p), rat(0, 1), rat(1, 1));
    let t = Mat2::diag(rat(1, p), rat(p, 1));
    let delta = n.mul(&gamma).mul(&t);
    if !in_group(&delta, &GroupSpec::gamma0(4)) {
        return Err(MetaplecticError::WitnessCheck(format!("δ = {delta}")));
    }
    if delta.c != rat(c, 1) || delta.d != rat(p * d, 1) {
        return Err(MetaplecticError::WitnessCheck(format!("δ has bottom row ({}, {})", delta.c, delta.d)));
    }
    let eta = epsilon_gamma(&gamma)? * epsilon_gamma(&delta)?.conj();
    let closed_form = epsilon_d(&BigInt::from(p))? * FourthRoot::from_sign(kronecker_i64(-j, p)?);
    Ok(EtaWitness { j, p, gamma, delta, eta, closed_form })
}

/// `arg(pcz+d) - arg(cp²z+pd)` for the witness `γ` at `z`.
pub fn eta_angle_residual(w: &EtaWitness, z: &UpperHalfPoint) -> f64 {
    let [_, _, pc, d] = w.gamma.to_f64();
    let p = w.p as f64;
    let a1 = (pc * z.y).atan2(pc.mul_add(z.x, d));
    let cp2 = pc * p;
    let a2 = (cp2 * z.y).atan2(cp2.mul_add(z.x, p * d));
    a1 - a2
}

/// `Σ_{j=1}^{p-1} η(j)` as an exact Gaussian integer `(re, im)`, with each
/// `η(j)` checked against `ε_p (-j/p)`.
pub fn eta_sum(p: i64) -> Result<(i64, i64), MetaplecticError> {
    let mut sum = (0i64, 0i64);
    for j in 1..p {
        let w = eta_factor(j, p)?;
        if w.eta != w.closed_form {
            return Err(MetaplecticError::WitnessCheck(format!(
                "η({j}) = {} but ε_p(-j/p) = {} for p = {p}",
                w.eta, w.closed_form
            )));
        }
        let (re, im) = w.eta.gaussian();
        sum.0 += re;
        sum.1 += im;
    }
    Ok(sum)
}

/// Result of conjugating `(1,0;ℓ,1)` by `(p⁻¹, j; 0, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspTransfer {
    pub matrix: Mat2,
    /// Equals `(1+jpℓ, -j²ℓ; p²ℓ, 1-jpℓ)` exactly.
    pub matches_formula: bool,
    pub det_one: bool,
    /// Whether the conjugate itself lies in `Γ₀(4)`.
    pub in_gamma0_4: bool,
    /// Whether the conjugate lies in `Γ₀(4) (1,0;ℓ,1)`.
    pub same_coset_as_generator: bool,
}

pub fn cusp_transfer_identity(ell: i64, j: i64, p: i64) -> Result<CuspTransfer, MetaplecticError> {
    if !is_odd_prime(p) {
        return Err(MetaplecticError::NotOddPrime(p));
    }
    let a = Mat2::new(rat(1, p), rat(j, 1), rat(0, 1), rat(p, 1));
    let l = Mat2::from_ints(1, 0, ell, 1);
    let matrix = a.conjugate(&l)?;
    let formula = Mat2::from_ints(1 + j * p * ell, -j * j * ell, p * p * ell, 1 - j * p * ell);
    let g04 = GroupSpec::gamma0(4);
    let quotient = matrix.mul(&l.inverse()?);
    Ok(CuspTransfer {
        matches_formula: matrix == formula,
        det_one: matrix.det().is_one(),
        in_gamma0_4: in_group(&matrix, &g04),
        same_coset_as_generator: in_group(&quotient, &g04),
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(x: f64, y: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(x, y).unwrap()
    }

    #[test]
    fn trivial_multipliers() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(theta_multiplier(&Mat2::identity(), &z(0.3, 0.7)).unwrap(), one);
        assert_eq!(theta_multiplier(&Mat2::from_ints(1, 1, 0, 1), &z(0.3, 0.7)).unwrap(), one);
        let m = theta_multiplier(&Mat2::from_ints(-1, 0, 0, -1), &z(0.3, 0.7)).unwrap();
        assert!((m - one).norm() < 1e-15);
        assert!(theta_multiplier(&Mat2::from_ints(1, 0, 2, 1), &z(0.0, 1.0)).is_err());
    }

    #[test]
    fn cocycle_with_inverse() {
        let g = Mat2::from_ints(5, 2, 12, 5);
        let r = cocycle_residual(&g, &g.inverse().unwrap(), &z(0.1, 0.9)).unwrap();
        assert!(r < 1e-12);
        assert_eq!(cocycle_residual(&Mat2::identity(), &Mat2::identity(), &z(0.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_sum(5).unwrap(), (0, 0));
        for j in 1..5 {
            let w = eta_factor(j, 5).unwrap();
            if kronecker_i64(-j, 5).unwrap() == 1 {
                assert_eq!(w.eta, FourthRoot::ONE);
            }
        }
        for j in 1..7 {
            let w = eta_factor(j, 7).unwrap();
            let expected = FourthRoot::I * FourthRoot::from_sign(kronecker_i64(-j, 7).unwrap());
            assert_eq!(w.eta, expected);
        }
        assert!(eta_factor(0, 5).is_err());
        assert!(eta_factor(1, 9).is_err());
    }

    #[test]
    fn cusp_transfer_examples() {
        let t = cusp_transfer_identity(1, 0, 7).unwrap();
        assert_eq!(t.matrix, Mat2::from_ints(1, 0, 49, 1));
        assert!(t.matches_formula && t.det_one && t.same_coset_as_generator);
        assert!(!t.in_gamma0_4);
        let t = cusp_transfer_identity(2, -4, 5).unwrap();
        assert_eq!(t.matrix, Mat2::from_ints(1 - 40, -32, 50, 1 + 40));
        assert!(t.same_coset_as_generator && !t.in_gamma0_4);
        let t = cusp_transfer_identity(1, -8, 3).unwrap();
        assert!(t.matches_formula && t.det_one && t.same_coset_as_generator);
    }
}
