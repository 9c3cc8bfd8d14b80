//! Exact 2×2 matrix arithmetic, quadratic symbols, congruence subgroups and
//! reduction to the standard fundamental domain.

mod group;
mod mat;
mod point;
mod symbols;

pub use group::{coset_reps, in_group, CosetTable, GroupSpec};
pub use mat::{rat, Mat2};
pub use point::{act_precise, htt, reduce_point, UpperHalfPoint};
pub use symbols::{epsilon_d, kronecker, kronecker_i64, FourthRoot};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("modulus {0} must be odd")]
    EvenModulus(String),
    #[error("point must lie in the upper half plane (y = {0})")]
    NotInUpperHalfPlane(f64),
    #[error("invalid group spec Γ₀({c}/{b}): {reason}")]
    InvalidGroupSpec { c: u64, b: u64, reason: &'static str },
    #[error("coset certificate failed for level {level}: {reason}")]
    CosetCertificate { level: u64, reason: String },
    #[error("matrix is singular")]
    Singular,
    #[error("reduction did not terminate")]
    ReductionStalled,
}

/// Generators used to build random group elements as words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    /// `(1,1;0,1)`
    T,
    /// `(1,-1;0,1)`
    TInv,
    /// `(1,0;4,1)`
    U,
    /// `(1,0;-4,1)`
    UInv,
    /// `(0,-1;1,0)`
    S,
}

impl Letter {
    pub fn matrix(self) -> Mat2 {
        match self {
            Letter::T => Mat2::from_ints(1, 1, 0, 1),
            Letter::TInv => Mat2::from_ints(1, -1, 0, 1),
            Letter::U => Mat2::from_ints(1, 0, 4, 1),
            Letter::UInv => Mat2::from_ints(1, 0, -4, 1),
            Letter::S => Mat2::from_ints(0, -1, 1, 0),
        }
    }
}

/// Product of the letters, left to right.
pub fn word_matrix(word: &[Letter]) -> Mat2 {
    word.iter()
        .fold(Mat2::identity(), |acc, l| acc.mul(&l.matrix()))
}
