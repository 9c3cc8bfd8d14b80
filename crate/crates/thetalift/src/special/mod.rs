//! Imaginary-order `K`-Bessel functions, the Whittaker function `W_{κ,μ}`,
//! the Whittaker functions attached to `h` and to a Maass form, and the
//! tail functionals `V` and `V₀`.

mod bessel;
mod functionals;
pub mod gamma;
pub mod quad;
mod table;
mod whittaker;

pub use bessel::{bessel_k, bessel_k_parts, bessel_k_scaled, bessel_k_underflows};
pub use functionals::{
    maass_whittaker, v0_functional, v_functional, v_functional_with_error, w_h, w_h_envelope,
    w_h_small_amplitude, Envelope,
};
pub use table::WhTable;
pub use whittaker::{small_amplitude, whittaker_w, whittaker_w_envelope};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("κ = {0} is not one of 0, 1/4, -1/4")]
    UnsupportedKappa(f64),
    #[error("μ = {0} must be purely imaginary or real with |μ| < 1/4")]
    UnsupportedMu(Complex64),
    #[error("argument {0} must be positive")]
    NonPositive(f64),
    #[error("argument must be nonzero")]
    Zero,
    #[error("invalid spectral parameter: {0}")]
    InvalidParam(String),
}

/// Spectral parameter `t` with Laplace eigenvalue `1/4 + t²`: either real or
/// `t = i s` with `0 < |s| < 1/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralParam {
    Real(f64),
    Imaginary(f64),
}

/// Spectral parameter of the first Maass cusp form on `SL₂(ℤ)` (an odd form).
pub const DEFAULT_T: f64 = 9.533695;

impl SpectralParam {
    pub fn real(t: f64) -> Result<Self, SpecialError> {
        if t.is_finite() {
            Ok(SpectralParam::Real(t))
        } else {
            Err(SpecialError::InvalidParam(format!("t = {t}")))
        }
    }

    pub fn imaginary(s: f64) -> Result<Self, SpecialError> {
        if s != 0.0 && s.abs() < 0.5 {
            Ok(SpectralParam::Imaginary(s))
        } else {
            Err(SpecialError::InvalidParam(format!("t = {s}i needs 0 < |Im t| < 1/2")))
        }
    }

    pub fn default_maass() -> Self {
        SpectralParam::Real(DEFAULT_T)
    }

    pub fn eigenvalue(&self) -> f64 {
        match *self {
            SpectralParam::Real(t) => 0.25 + t * t,
            SpectralParam::Imaginary(s) => 0.25 - s * s,
        }
    }

    /// `t` as a complex number.
    pub fn as_complex(&self) -> Complex64 {
        match *self {
            SpectralParam::Real(t) => Complex64::new(t, 0.0),
            SpectralParam::Imaginary(s) => Complex64::new(0.0, s),
        }
    }

    /// `μ = i t / 2`.
    pub fn half_mu(&self) -> Complex64 {
        Complex64::new(0.0, 0.5) * self.as_complex()
    }

    /// Decay exponent `ϑ ∈ (|Im t|, 1/2)` used in small-`y` envelopes.
    pub fn vartheta(&self) -> f64 {
        match *self {
            SpectralParam::Real(_) => 0.49,
            SpectralParam::Imaginary(s) => 0.5 - s.abs() - 0.01,
        }
    }
}
