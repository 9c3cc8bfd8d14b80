//! Fourier expansions of `Ψ`, `h`, `h♯`, `h_ℓ` and `h_ℓ♯`, the `U_p`-type
//! averaging identity, the cusps of `Γ₀(4/p)`, Petersson quadrature over
//! coset tilings, and the cusp integrals and moments built from them.

mod cusps;
mod expansions;
mod integrals;
mod petersson;
mod series;

pub use cusps::{
    cusp_data, expected_widths, fiber_count, max_fiber_count, width_by_formula, Cusp, CuspDatum,
};
pub use expansions::{
    eval_h_family, eval_maass, verify_up_identity, Evaluation, HMember, SharpForm, UpCheck,
};
pub use integrals::{
    compute_i0, compute_i_cusp, compute_r, measure_chain_constants, quad_moment_functional,
    ChainConstants, CuspIntegral, IntegralPolicy, QuadMoment, SHIPPED_U0,
};
pub use petersson::{petersson_quadrature, PeterssonValue, QuadraturePolicy};
pub use series::{CoefficientSeries, Parity, SeriesKind, TailModel};

use thiserror::Error;

use crate::arith::ArithError;
use crate::special::SpecialError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AutomorphicError {
    #[error("series invariant violated ({invariant}): {detail}")]
    InvalidSeries { invariant: &'static str, detail: String },
    #[error("operation needs a {expected} series")]
    WrongKind { expected: &'static str },
    #[error("neglected tail {tail:e} exceeds tolerance {tol:e} at Im = {y}")]
    TailTooLarge { y: f64, tail: f64, tol: f64 },
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no decay envelope supplied, so the tail above Y = {cutoff} cannot be bounded")]
    MissingEnvelope { cutoff: f64 },
    #[error("tail bound {tail:e} above Y = {cutoff} exceeds tolerance {tol:e}")]
    TailNotClosed { cutoff: f64, tail: f64, tol: f64 },
    #[error("cusp table for p = {p}: {reason}")]
    CuspTable { p: u64, reason: String },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub(crate) fn check_prime(p: u64) -> Result<(), AutomorphicError> {
    if crate::metaplectic::is_odd_prime(p as i64) {
        Ok(())
    } else {
        Err(AutomorphicError::NotOddPrime(p))
    }
}
