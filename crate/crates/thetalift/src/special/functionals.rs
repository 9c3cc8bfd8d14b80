use std::f64::consts::PI;

use super::quad::gl20;
use super::whittaker::{small_amplitude, whittaker_w, whittaker_w_envelope};
use super::{bessel_k, SpecialError, SpectralParam};

fn kappa_of(y: f64) -> f64 {
    if y > 0.0 {
        0.25
    } else {
        -0.25
    }
}

/// `W(y) = W_{sgn(y)/4, it/2}(4π|y|)`.
pub fn w_h(t: SpectralParam, y: f64) -> Result<f64, SpecialError> {
    if y == 0.0 {
        return Err(SpecialError::Zero);
    }
    whittaker_w(kappa_of(y), t.half_mu(), 4.0 * PI * y.abs())
}

/// Rigorous bound for `|W(y)|`.
pub fn w_h_envelope(t: SpectralParam, y: f64) -> Result<f64, SpecialError> {
    if y == 0.0 {
        return Err(SpecialError::Zero);
    }
    whittaker_w_envelope(kappa_of(y), t.half_mu(), 4.0 * PI * y.abs())
}

/// `lim_{y→0} |W(y)| / |y|^{1/2}` envelope amplitude `2|Γ(2μ)/Γ(1/2+μ-κ)|·√(4π)`
/// for the sign of `y`.
pub fn w_h_small_amplitude(t: SpectralParam, y_sign: f64) -> f64 {
    small_amplitude(kappa_of(y_sign), t.half_mu()) * (4.0 * PI).sqrt()
}

/// Maass Whittaker function `W_Ψ(y) = 2|y|^{1/2} K_{it}(2π|y|)`.
pub fn maass_whittaker(t: SpectralParam, y: f64) -> Result<f64, SpecialError> {
    if y == 0.0 {
        return Err(SpecialError::Zero);
    }
    Ok(2.0 * y.abs().sqrt() * bessel_k(t, 2.0 * PI * y.abs())?)
}

/// Shapes against which `|W|` is compared.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Envelope {
    /// `|y|^{1/4} e^{-2π|y|}`
    Large,
    /// `|y|^{-1/4} e^{-2π|y|}`, sharper for `y < 0`
    LargeNegative,
    /// `|y|^{1/2-ϑ/2}`
    Small(f64),
}

impl Envelope {
    pub fn shape(&self, y: f64) -> f64 {
        let a = y.abs();
        match *self {
            Envelope::Large => a.powf(0.25) * (-2.0 * PI * a).exp(),
            Envelope::LargeNegative => a.powf(-0.25) * (-2.0 * PI * a).exp(),
            Envelope::Small(theta) => a.powf(0.5 - 0.5 * theta),
        }
    }
}

/// Point beyond which `∫ y^{-3/2}|W|² dy` is below `1e-26`, from the envelope.
fn cutoff(t: SpectralParam, start: f64) -> Result<f64, SpecialError> {
    let mut y = start.max(1.0);
    let amp = w_h_envelope(t, 1.0)?.max(w_h_envelope(t, -1.0)?);
    // |W(y)|² ≤ amp² y^{1/2} e^{-4π(y-1)} for y ≥ 1
    while amp * amp * (-4.0 * PI * (y - 1.0)).exp() / (4.0 * PI) > 1e-26 {
        y += 0.25;
    }
    Ok(y)
}

fn log_quadrature(
    t: SpectralParam,
    u: f64,
    power: f64,
    panels_per_unit: f64,
) -> Result<f64, SpecialError> {
    if u == 0.0 || !u.is_finite() {
        return Err(SpecialError::Zero);
    }
    let sign = u.signum();
    let lo = u.abs().ln();
    let hi = cutoff(t, u.abs())?.ln();
    if lo >= hi {
        return Ok(0.0);
    }
    let nu = t.half_mu().im.abs();
    let width = 0.25 * (10.0 / (1.0 + nu)).min(1.0) / panels_per_unit;
    let n = ((hi - lo) / width).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let rule = gl20();
    let mut total = 0.0;
    for k in 0..n {
        let a = lo + h * k as f64;
        let mut part = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let v = a + 0.5 * h * (x + 1.0);
            let y = v.exp();
            let wv = w_h(t, sign * y)?;
            part += w * y.powf(power) * wv * wv;
        }
        total += 0.5 * h * part;
    }
    Ok(total)
}

/// `V(u) = ∫_{|u|}^∞ y^{1/2} |W(sgn(u) y)|² dy/y²`.
pub fn v_functional(t: SpectralParam, u: f64) -> Result<f64, SpecialError> {
    log_quadrature(t, u, -0.5, 1.0)
}

/// `V(u)` with the difference from a run on twice as many panels.
pub fn v_functional_with_error(t: SpectralParam, u: f64) -> Result<(f64, f64), SpecialError> {
    let fine = log_quadrature(t, u, -0.5, 2.0)?;
    Ok((fine, (fine - log_quadrature(t, u, -0.5, 1.0)?).abs()))
}

/// `V₀(u) = ∫_{|u|}^∞ |W(sgn(u) y)|² dy/y²`.
pub fn v0_functional(t: SpectralParam, u: f64) -> Result<f64, SpecialError> {
    log_quadrature(t, u, -1.0, 1.0)
}
