//! Brute-force counts over `F_p`: lines fixed by a nilpotent-type matrix, and
//! the cosets `Γ₀(p)γ` with `α ∈ γ⁻¹ S(1/p) γ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{coset_reps, rat, ArithError, Mat2};
use crate::lattices::LatticeSpec;
use crate::metaplectic::is_odd_prime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiniteGeomError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),
    #[error("{0} is not in p⁻¹S")]
    NotInScaledS(String),
    #[error("brute force gave {brute} but the closed form gives {closed} for {what}")]
    ClosedFormMismatch { what: String, brute: u64, closed: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A matrix over `F_p` with entries in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatModP {
    pub e: [u64; 4],
    pub p: u64,
}

impl MatModP {
    pub fn new(a: i64, b: i64, c: i64, d: i64, p: u64) -> Result<Self, FiniteGeomError> {
        if !is_odd_prime(p as i64) {
            return Err(FiniteGeomError::NotOddPrime(p as i64));
        }
        let r = |x: i64| x.rem_euclid(p as i64) as u64;
        Ok(MatModP { e: [r(a), r(b), r(c), r(d)], p })
    }

    pub fn trace(&self) -> u64 {
        (self.e[0] + self.e[3]) % self.p
    }

    pub fn det(&self) -> u64 {
        let p = self.p;
        (self.e[0] * self.e[3] % p + p - self.e[1] * self.e[2] % p) % p
    }

    pub fn is_zero(&self) -> bool {
        self.e == [0; 4]
    }

    fn apply(&self, v: [u64; 2]) -> [u64; 2] {
        let p = self.p;
        [
            (self.e[0] * v[0] + self.e[1] * v[1]) % p,
            (self.e[2] * v[0] + self.e[3] * v[1]) % p,
        ]
    }
}

/// The `p+1` points `(1:t)` and `(0:1)` of `P¹(F_p)`.
pub fn lines(p: u64) -> Vec<[u64; 2]> {
    (0..p).map(|t| [1, t]).chain(std::iter::once([0, 1])).collect()
}

fn parallel(u: [u64; 2], v: [u64; 2], p: u64) -> bool {
    (u[0] * v[1] % p + p - u[1] * v[0] % p) % p == 0
}

/// `#{gB ∈ G/B : x ∈ g L g⁻¹}`, where `g L g⁻¹` is the set of nilpotents
/// killing the line `gℓ` and mapping into it. Checked against the closed form.
pub fn nilpotent_line_count(x: &MatModP) -> Result<u64, FiniteGeomError> {
    let p = x.p;
    let brute = lines(p)
        .into_iter()
        .filter(|&v| {
            x.apply(v) == [0, 0]
                && parallel(x.apply([1, 0]), v, p)
                && parallel(x.apply([0, 1]), v, p)
        })
        .count() as u64;
    let closed = if x.is_zero() {
        p + 1
    } else if x.trace() == 0 && x.det() == 0 {
        1
    } else {
        0
    };
    if brute != closed {
        return Err(FiniteGeomError::ClosedFormMismatch { what: format!("{x:?}"), brute, closed });
    }
    Ok(brute)
}

/// Sum of [`nilpotent_line_count`] over all of `M₂(F_p)`.
pub fn total_line_incidences(p: u64) -> Result<u64, FiniteGeomError> {
    let pi = p as i64;
    (0..pi.pow(4))
        .into_par_iter()
        .map(|k| {
            let x = MatModP::new(k % pi, k / pi % pi, k / pi / pi % pi, k / pi / pi / pi, p)?;
            nilpotent_line_count(&x)
        })
        .sum()
}

/// `#{γ ∈ Γ₀(p)\SL₂(ℤ) : α ∈ γ⁻¹ S(1/p) γ}` by exact membership over
/// [`coset_reps`], checked against the trichotomy `0`, `1` (`α ∉ S`) or
/// `p+1` (`α ∈ S`).
pub fn coset_containment_count(alpha: &Mat2, p: u64) -> Result<u64, FiniteGeomError> {
    if !is_odd_prime(p as i64) {
        return Err(FiniteGeomError::NotOddPrime(p as i64));
    }
    let s = LatticeSpec::s(1, 1);
    let pr = BigRational::from_integer(BigInt::from(p));
    if !s.contains(&alpha.scale(&pr)) {
        return Err(FiniteGeomError::NotInScaledS(alpha.to_string()));
    }
    let target = LatticeSpec::s(1, p);
    let brute = coset_reps(p)?
        .iter()
        .filter(|g| {
            let gi = g.inverse().expect("coset representatives are invertible");
            target.contains(&g.mul(alpha).mul(&gi))
        })
        .count() as u64;
    let admissible = alpha.trace().is_integer() && (alpha.det() * &pr).is_integer();
    let closed = match (admissible, s.contains(alpha)) {
        (false, _) => 0,
        (true, false) => 1,
        (true, true) => p + 1,
    };
    if brute != closed {
        return Err(FiniteGeomError::ClosedFormMismatch {
            what: alpha.to_string(),
            brute,
            closed,
        });
    }
    Ok(brute)
}

/// `(1/p)·m` for an integer matrix `m`.
pub fn scaled(m: [i64; 4], p: u64) -> Mat2 {
    let p = p.to_i64().expect("small prime");
    Mat2::new(rat(m[0], p), rat(m[1], p), rat(m[2], p), rat(m[3], p))
}
