//! Jacobi theta, the Gaussian kernels `φ⁰` and `φ`, the theta kernels
//! `θ(w,z)` and `θ(L; w₁, w₂, z)`, the coset sum `θ♯`, and numerical checks
//! of the identities relating them.

mod identities;

pub use identities::{
    fine_grid, published_grid, second_point, verify_identity, Identity, IdentityCheck,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{act_precise, coset_reps, ArithError, Mat2, UpperHalfPoint};
use crate::dd::Dd;
use crate::lattices::{majorant_norm, FinckePohst, LatticeError, LatticeSpec, PreparedBasis};
use crate::metaplectic::{theta_multiplier, MetaplecticError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("truncation bound {needed:.3e} exceeds the cap {cap:.3e}")]
    CapReached { needed: f64, cap: f64 },
    #[error("{0} is not traceless")]
    NotTraceless(String),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0} has entries outside i64")]
    Overflow(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Metaplectic(#[from] MetaplecticError),
}

/// How far to sum: the certified tail must be at most `target_abs_error`,
/// and the norm bound may not exceed `max_bound`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub target_abs_error: f64,
    pub max_bound: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { target_abs_error: 1e-12, max_bound: 1e12 }
    }
}

impl TruncationPolicy {
    pub fn with_target(target_abs_error: f64) -> Self {
        TruncationPolicy { target_abs_error, ..Default::default() }
    }
}

/// A truncated sum with its certified tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    pub tail_bound: f64,
    /// Norm bound the sum was truncated at.
    pub bound: f64,
    pub terms: usize,
}

/// `e(t) = e^{2πit}` for `t` given by its fractional part.
fn e_frac(f: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * f)
}

fn frac(t: f64) -> f64 {
    t - t.floor()
}

/// `θ(z) = y^{1/4} Σ_n e(n² z)`.
pub fn jacobi_theta(z: &UpperHalfPoint, pol: &TruncationPolicy) -> Result<ThetaValue, ThetaError> {
    jacobi_theta_dd(Dd::new(z.x), z.y, pol)
}

/// [`jacobi_theta`] with the real part carried in double-double.
pub fn jacobi_theta_dd(x: Dd, y: f64, pol: &TruncationPolicy) -> Result<ThetaValue, ThetaError> {
    let y4 = y.powf(0.25);
    let tail = |n: f64| {
        let q = (-2.0 * PI * y * (n + 1.0) * (n + 1.0)).exp();
        let r = (-2.0 * PI * y * (2.0 * n + 3.0)).exp();
        y4 * 2.0 * q / (1.0 - r)
    };
    let mut n = ((2.0 * y4 / pol.target_abs_error).ln().max(0.0) / (2.0 * PI * y)).sqrt().floor();
    while tail(n) > pol.target_abs_error {
        n += 1.0;
    }
    if n * n > pol.max_bound {
        return Err(ThetaError::CapReached { needed: n * n, cap: pol.max_bound });
    }
    let top = n as u64;
    let mut sum = Complex64::zero();
    for k in (1..=top).rev() {
        let k2 = (k * k) as f64;
        let phase = (x * Dd::new(k2)).frac();
        sum += e_frac(phase) * (-2.0 * PI * y * k2).exp();
    }
    Ok(ThetaValue {
        value: (Complex64::new(1.0, 0.0) + 2.0 * sum) * y4,
        tail_bound: tail(n),
        bound: n * n,
        terms: 2 * top as usize + 1,
    })
}

/// `θ(γz)/θ(z)` with `γz` computed in double-double.
pub fn theta_quotient(
    g: &Mat2,
    z: &UpperHalfPoint,
    pol: &TruncationPolicy,
) -> Result<Complex64, ThetaError> {
    let e = g.i64_entries().ok_or_else(|| ThetaError::Overflow(g.to_string()))?;
    let (gx, gy) = act_precise(&e, z);
    Ok(jacobi_theta_dd(gx, gy, pol)?.value / jacobi_theta(z, pol)?.value)
}

/// `|J(γ, z) - θ(γz)/θ(z)|`.
pub fn multiplier_residual(
    g: &Mat2,
    z: &UpperHalfPoint,
    pol: &TruncationPolicy,
) -> Result<f64, ThetaError> {
    Ok((theta_multiplier(g, z)? - theta_quotient(g, z, pol)?).norm())
}

/// `φ⁰_{w,z}(α) = (2π)⁻¹ y^{3/4} exp(-2πy P(σ_w⁻¹ α σ_w)) e(x det α)` for traceless `α`.
pub fn phi0(w: &UpperHalfPoint, z: &UpperHalfPoint, alpha: &Mat2) -> Result<Complex64, ThetaError> {
    if !alpha.trace().is_zero() {
        return Err(ThetaError::NotTraceless(alpha.to_string()));
    }
    Ok(kernel(w, w, z, alpha, 0.75))
}

/// `φ_{w₁,w₂,z}(α) = (2π)⁻¹ y exp(-2πy P(σ_{w₁}⁻¹ α σ_{w₂})) e(x det α)`.
pub fn phi(w1: &UpperHalfPoint, w2: &UpperHalfPoint, z: &UpperHalfPoint, alpha: &Mat2) -> Complex64 {
    kernel(w1, w2, z, alpha, 1.0)
}

fn kernel(w1: &UpperHalfPoint, w2: &UpperHalfPoint, z: &UpperHalfPoint, alpha: &Mat2, y_pow: f64) -> Complex64 {
    let p = majorant_norm(alpha, w1, w2);
    let det = alpha.det().to_f64().expect("finite determinant");
    let amp = z.y.powf(y_pow) / (2.0 * PI) * (-2.0 * PI * z.y * p).exp();
    e_frac(frac(z.x * det)) * amp
}

/// A lattice theta sum `Σ_α y^k (2π)⁻¹ e^{-2πyP} e(x' det α)` at
/// `x' = x + shift`, the shift being an exact rational `num/den`.
#[derive(Clone, Copy, Debug)]
pub struct LatticeSum<'a> {
    pub basis: &'a PreparedBasis,
    pub w1: UpperHalfPoint,
    pub w2: UpperHalfPoint,
    pub z: UpperHalfPoint,
    pub shift: (i64, i64),
    /// `3/4` for `φ⁰`, `1` for `φ`.
    pub y_power: f64,
}

impl LatticeSum<'_> {
    /// Certified `Σ_{P > B} |term| ≤ pref · e^{-(1-s)aB} ∏ (1 + √(π/(s a q_ii)))`,
    /// minimized over `s`; returns `(B, tail)` with the tail at most the target.
    fn bound(&self, fp: &FinckePohst, pol: &TruncationPolicy) -> Result<(f64, f64), ThetaError> {
        let a = 2.0 * PI * self.z.y;
        let pref = self.z.y.powf(self.y_power) / (2.0 * PI);
        let q = fp.diag();
        let mut best = (f64::INFINITY, f64::INFINITY);
        for s in [0.25, 0.5, 0.75] {
            let prod: f64 = q.iter().map(|qi| 1.0 + (PI / (s * a * qi)).sqrt()).product();
            let b = ((pref * prod / pol.target_abs_error).ln() / ((1.0 - s) * a)).max(0.0);
            if b < best.0 {
                best = (b, pref * prod * (-(1.0 - s) * a * b).exp());
            }
        }
        if best.0 > pol.max_bound {
            return Err(ThetaError::CapReached { needed: best.0, cap: pol.max_bound });
        }
        Ok(best)
    }

    pub fn evaluate(&self, pol: &TruncationPolicy) -> Result<ThetaValue, ThetaError> {
        let fp = FinckePohst::new(&self.basis.majorant(&self.w1, &self.w2))?;
        let (b, tail) = self.bound(&fp, pol)?;
        let (pts, _) = self.basis.enumerate(&self.w1, &self.w2, b)?;
        let (num, den) = self.shift;
        let dden = self.basis.det_den;
        let modulus = den as i128 * dden;
        let a = 2.0 * PI * self.z.y;
        let pref = self.z.y.powf(self.y_power) / (2.0 * PI);
        let x = self.z.x;
        let terms: Vec<Complex64> = pts
            .par_iter()
            .map(|pt| {
                let f1 = frac(x * pt.det_num as f64 / dden as f64);
                let r = (num as i128 * pt.det_num).rem_euclid(modulus);
                let f2 = r as f64 / modulus as f64;
                e_frac(frac(f1 + f2)) * (pref * (-a * pt.norm).exp())
            })
            .collect();
        let value = terms.iter().fold(Complex64::zero(), |s, t| s + t);
        Ok(ThetaValue { value, tail_bound: tail, bound: b, terms: terms.len() })
    }
}

/// `θ(w, z) = Σ_{α ∈ S⁰} φ⁰_{w,z}(α)`.
pub fn theta_kernel(
    w: &UpperHalfPoint,
    z: &UpperHalfPoint,
    pol: &TruncationPolicy,
) -> Result<ThetaValue, ThetaError> {
    theta_kernel_shifted(w, z, (0, 1), pol)
}

/// `θ(w, z + num/den)` with the shift applied exactly.
pub fn theta_kernel_shifted(
    w: &UpperHalfPoint,
    z: &UpperHalfPoint,
    shift: (i64, i64),
    pol: &TruncationPolicy,
) -> Result<ThetaValue, ThetaError> {
    let basis = PreparedBasis::from_spec(&LatticeSpec::s0(1, 1))?;
    LatticeSum { basis: &basis, w1: *w, w2: *w, z: *z, shift, y_power: 0.75 }.evaluate(pol)
}

/// `θ(L; w₁, w₂, z) = Σ_{α ∈ L} φ_{w₁,w₂,z}(α)`.
pub fn theta_lattice(
    spec: &LatticeSpec,
    w1: &UpperHalfPoint,
    w2: &UpperHalfPoint,
    z: &UpperHalfPoint,
    pol: &TruncationPolicy,
) -> Result<ThetaValue, ThetaError> {
    theta_lattice_shifted(spec, w1, w2, z, (0, 1), pol)
}

pub fn theta_lattice_shifted(
    spec: &LatticeSpec,
    w1: &UpperHalfPoint,
    w2: &UpperHalfPoint,
    z: &UpperHalfPoint,
    shift: (i64, i64),
    pol: &TruncationPolicy,
) -> Result<ThetaValue, ThetaError> {
    let basis = PreparedBasis::from_spec(spec)?;
    LatticeSum { basis: &basis, w1: *w1, w2: *w2, z: *z, shift, y_power: 1.0 }.evaluate(pol)
}

fn check_prime(p: u64) -> Result<(), ThetaError> {
    if crate::metaplectic::is_odd_prime(p as i64) {
        Ok(())
    } else {
        Err(ThetaError::NotOddPrime(p))
    }
}

/// `θ♯(w, z) = Σ_{γ ∈ Γ₀(p)\SL₂(ℤ)} θ(S(1/p); γw, γw, z)`.
pub fn theta_sharp(
    w: &UpperHalfPoint,
    z: &UpperHalfPoint,
    p: u64,
    pol: &TruncationPolicy,
) -> Result<ThetaValue, ThetaError> {
    check_prime(p)?;
    theta_sharp_with_reps(w, z, p, &coset_reps(p)?, pol)
}

/// [`theta_sharp`] over caller-supplied coset representatives.
pub fn theta_sharp_with_reps(
    w: &UpperHalfPoint,
    z: &UpperHalfPoint,
    p: u64,
    reps: &[Mat2],
    pol: &TruncationPolicy,
) -> Result<ThetaValue, ThetaError> {
    check_prime(p)?;
    let basis = PreparedBasis::from_spec(&LatticeSpec::s(1, p))?;
    let mut total = ThetaValue { value: Complex64::zero(), tail_bound: 0.0, bound: 0.0, terms: 0 };
    for g in reps {
        let gw = g.act(w);
        let v = LatticeSum { basis: &basis, w1: gw, w2: gw, z: *z, shift: (0, 1), y_power: 1.0 }
            .evaluate(pol)?;
        total.value += v.value;
        total.tail_bound += v.tail_bound;
        total.bound = total.bound.max(v.bound);
        total.terms += v.terms;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_at_i() {
        let v = jacobi_theta(&UpperHalfPoint::i(), &TruncationPolicy::default()).unwrap();
        let direct: f64 = 1.0 + 2.0 * (1..6).map(|n| (-2.0 * PI * (n * n) as f64).exp()).sum::<f64>();
        assert!((v.value.re - direct).abs() < 1e-15 && v.value.im.abs() < 1e-15);
        assert!((v.value.re - 1.003_734_89).abs() < 1e-8);
    }

    #[test]
    fn phi_at_zero() {
        let z = UpperHalfPoint::new(0.3, 1.7).unwrap();
        let w = UpperHalfPoint::new(-0.2, 0.9).unwrap();
        let v = phi(&w, &UpperHalfPoint::i(), &z, &Mat2::zero());
        assert!((v - Complex64::new(1.7 / (2.0 * PI), 0.0)).norm() < 1e-16);
        assert!(phi0(&w, &z, &Mat2::identity()).is_err());
    }

    #[test]
    fn shift_is_exact() {
        let w = UpperHalfPoint::new(0.1, 1.3).unwrap();
        let z = UpperHalfPoint::new(0.05, 0.9).unwrap();
        let pol = TruncationPolicy::default();
        let spec = LatticeSpec::s(1, 3);
        let a = theta_lattice_shifted(&spec, &w, &w, &z, (1, 4), &pol).unwrap().value;
        let b = theta_lattice(&spec, &w, &w, &z.translate(0.25), &pol).unwrap().value;
        assert!((a - b).norm() < 1e-13);
    }
}
