use std::f64::consts::PI;

use num_complex::Complex64;

use super::series::{CoefficientSeries, Parity, Row, SeriesKind};
use super::{check_prime, AutomorphicError};
use crate::arith::UpperHalfPoint;

/// Which expansion of `h♯` (or `h_ℓ♯`) to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SharpForm {
    /// Fourier expansion in the coefficients `b(pn)`.
    Expansion,
    /// `p^{-1/2} Σ_j h((z + pj)/p²)` evaluated term by term.
    Average,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HMember {
    H,
    Sharp { p: u64, form: SharpForm },
    /// `h_ℓ(z) = e^{-πi/4} F(…)`, `ℓ ∈ {1, 2}`, from the expansions at the
    /// cusps `0` and `1/2` of `Γ₀(4)`.
    Ell(u8),
    EllSharp { ell: u8, p: u64, form: SharpForm },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Residue class mod 4, height divisor and shift for `h_ℓ`:
/// `h_1(z) = e^{-πi/4}√2 Σ_{n≡0(4)} … W(ny/16) e(n(x+1)/16)` and
/// `h_2(z) = e^{-πi/4}√2 Σ_{n≡1(4)} … W(ny/4) e(n(x+1/2)/4)`.
fn ell_params(ell: u8) -> Result<(i64, f64, f64), AutomorphicError> {
    match ell {
        1 => Ok((0, 16.0, 1.0)),
        2 => Ok((1, 4.0, 0.5)),
        _ => Err(AutomorphicError::InvalidArgument(format!("ℓ = {ell}, expected 1 or 2"))),
    }
}

fn ell_coef() -> Complex64 {
    Complex64::from_polar(2f64.sqrt(), -PI / 4.0)
}

/// One member prepared at a fixed height: `coef Σ_{o} row((x + o + shift)·inv)`.
pub(crate) struct Prepared {
    row: Row,
    coef: Complex64,
    offsets: Vec<f64>,
    shift: f64,
    inv: f64,
}

impl Prepared {
    pub fn new(
        series: &CoefficientSeries,
        member: HMember,
        y: f64,
    ) -> Result<Prepared, AutomorphicError> {
        series.require(SeriesKind::HalfIntegral)?;
        let one = Complex64::new(1.0, 0.0);
        let prep = match member {
            HMember::H => Prepared {
                row: Row::half(series, |_| true, y)?,
                coef: one,
                offsets: vec![0.0],
                shift: 0.0,
                inv: 1.0,
            },
            HMember::Sharp { p, form } => {
                check_prime(p)?;
                let pf = p as f64;
                let p2 = pf * pf;
                match form {
                    SharpForm::Expansion => Prepared {
                        row: Row::half(series, |m| m % p as i64 == 0, y / p2)?,
                        coef: one * pf.sqrt(),
                        offsets: vec![0.0],
                        shift: 0.0,
                        inv: 1.0 / p2,
                    },
                    SharpForm::Average => Prepared {
                        row: Row::half(series, |_| true, y / p2)?,
                        coef: one / pf.sqrt(),
                        offsets: (0..p).map(|j| pf * j as f64).collect(),
                        shift: 0.0,
                        inv: 1.0 / p2,
                    },
                }
            }
            HMember::Ell(ell) => {
                let (class, div, shift) = ell_params(ell)?;
                Prepared {
                    row: Row::half(series, |n| n.rem_euclid(4) == class, y / div)?,
                    coef: ell_coef(),
                    offsets: vec![0.0],
                    shift,
                    inv: 1.0 / div,
                }
            }
            HMember::EllSharp { ell, p, form } => {
                check_prime(p)?;
                let (class, div, shift) = ell_params(ell)?;
                let pf = p as f64;
                let p2 = pf * pf;
                let pi = p as i64;
                match form {
                    SharpForm::Expansion => Prepared {
                        row: Row::half(
                            series,
                            |n| n.rem_euclid(4) == class && n % pi == 0,
                            y / (p2 * div),
                        )?,
                        coef: ell_coef() * pf.sqrt(),
                        offsets: vec![0.0],
                        shift: p2 * shift,
                        inv: 1.0 / (p2 * div),
                    },
                    // j runs over the representatives -4k of Z/p
                    SharpForm::Average => Prepared {
                        row: Row::half(series, |n| n.rem_euclid(4) == class, y / (p2 * div))?,
                        coef: ell_coef() / pf.sqrt(),
                        offsets: (0..p).map(|k| -4.0 * pf * k as f64).collect(),
                        shift: p2 * shift,
                        inv: 1.0 / (p2 * div),
                    },
                }
            }
        };
        Ok(prep)
    }

    pub fn at(&self, x: f64) -> Complex64 {
        self.coef
            * self.offsets.iter().map(|o| self.row.at((x + o + self.shift) * self.inv)).sum::<Complex64>()
    }

    pub fn tail(&self) -> f64 {
        self.coef.norm() * self.offsets.len() as f64 * self.row.tail
    }

    /// Bound for `|value|` at this height, including the tail.
    pub fn abs_bound(&self) -> f64 {
        self.coef.norm() * self.offsets.len() as f64 * self.row.abs_sum() + self.tail()
    }

    /// Indices and amplitudes of the underlying row, and its height scale.
    pub fn row(&self) -> &Row {
        &self.row
    }
}

/// `Ψ(z) = Σ_{n≥1} 2λ(n)n^{-1/2} W_Ψ(ny) cos(2πnx)` for even series, with
/// `sin` in place of `cos` for odd ones (the expansion divided by `i`).
pub fn eval_maass(series: &CoefficientSeries, z: &UpperHalfPoint) -> Result<f64, AutomorphicError> {
    series.require(SeriesKind::MaassIntegral)?;
    let row = Row::maass(series, z.y)?;
    series.check_tail(row.tail, z.y)?;
    let trig: fn(f64) -> f64 = match series.parity() {
        Parity::Even => f64::cos,
        Parity::Odd => f64::sin,
    };
    Ok(row
        .terms
        .iter()
        .map(|&(n, a)| 2.0 * a * trig(2.0 * PI * (n as f64 * z.x).rem_euclid(1.0)))
        .sum())
}

/// Evaluate one member of the `h` family, refusing when the neglected tail
/// exceeds the series tolerance.
pub fn eval_h_family(
    series: &CoefficientSeries,
    member: HMember,
    z: &UpperHalfPoint,
) -> Result<Evaluation, AutomorphicError> {
    let prep = Prepared::new(series, member, z.y)?;
    let tail = prep.tail();
    series.check_tail(tail, z.y)?;
    Ok(Evaluation { value: prep.at(z.x), tail_bound: tail })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub tail_bound: f64,
}

/// Compare `p^{-1/2} Σ_j h((z+pj)/p²)` with `Σ b(pn)|n|^{-1/2} W(ny/p) e(nx/p)`.
pub fn verify_up_identity(
    series: &CoefficientSeries,
    p: u64,
    z: &UpperHalfPoint,
) -> Result<UpCheck, AutomorphicError> {
    let lhs = eval_h_family(series, HMember::Sharp { p, form: SharpForm::Average }, z)?;
    let rhs = eval_h_family(series, HMember::Sharp { p, form: SharpForm::Expansion }, z)?;
    Ok(UpCheck {
        lhs: lhs.value,
        rhs: rhs.value,
        residual: (lhs.value - rhs.value).norm(),
        tail_bound: lhs.tail_bound + rhs.tail_bound,
    })
}
