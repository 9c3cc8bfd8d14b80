use super::quad::composite_doubling;
use super::{SpecialError, SpectralParam};

/// `K_{it}(y) = mantissa · e^{log_scale}`.
pub fn bessel_k_parts(t: SpectralParam, y: f64) -> Result<(f64, f64), SpecialError> {
    if !(y > 0.0) {
        return Err(SpecialError::NonPositive(y));
    }
    Ok(match t {
        SpectralParam::Real(nu) => imag_order(nu.abs(), y),
        SpectralParam::Imaginary(s) => real_order(s.abs(), y),
    })
}

/// `K_{it}(y)`; returns 0 once the value underflows (see [`bessel_k_underflows`]).
pub fn bessel_k(t: SpectralParam, y: f64) -> Result<f64, SpecialError> {
    let (scale, m) = bessel_k_parts(t, y)?;
    Ok(m * scale.exp())
}

/// `e^y K_{it}(y)`.
pub fn bessel_k_scaled(t: SpectralParam, y: f64) -> Result<f64, SpecialError> {
    let (scale, m) = bessel_k_parts(t, y)?;
    Ok(m * (scale + y).exp())
}

pub fn bessel_k_underflows(t: SpectralParam, y: f64) -> Result<bool, SpecialError> {
    let (scale, m) = bessel_k_parts(t, y)?;
    Ok(scale + m.abs().ln() < -708.0)
}

const CUT: f64 = 46.0;
const TOL: f64 = 1e-13;

/// Steepest-descent style contour: `θ = π/2` on `[0, s₀]`, then
/// `sin θ = ν/(y cosh s)`, with `s = s₀ + τ²` on the second piece.
fn imag_order(nu: f64, y: f64) -> (f64, f64) {
    let s0 = if nu > y { (nu / y).acosh() } else { 0.0 };
    let offset = if nu > y {
        -std::f64::consts::FRAC_PI_2 * nu
    } else {
        -((y - nu) * (y + nu)).sqrt() - nu * (nu / y).asin()
    };
    let mut total = 0.0;
    if s0 > 0.0 {
        let f = |s: f64| (nu * s - y * s.sinh()).cos();
        let panels = (s0 * nu.max(1.0) / std::f64::consts::PI).ceil() as usize + 2;
        total += composite_doubling(&f, 0.0, s0, panels, TOL).0;
    }
    // (Re f - offset, Im f, θ') at s = s₀ + τ²
    let point = |tau: f64| {
        let s = s0 + tau * tau;
        let c = s.cosh();
        let d = if s0 > 0.0 {
            2.0 * y * (0.5 * (s + s0)).sinh() * (0.5 * tau * tau).sinh()
        } else {
            let h = (0.5 * s).sinh();
            2.0 * y * h * h + (y - nu)
        };
        let root = (d * (y * c + nu)).sqrt();
        let theta = (nu / (y * c)).min(1.0).asin();
        let re = -root - nu * theta - offset;
        let im = nu * (s - s.tanh());
        let dtheta = if root > 0.0 { -nu * s.sinh() / (c * root) } else { 0.0 };
        (re, im, dtheta)
    };
    let mut tau_max = 1.0;
    while point(tau_max).0 > -CUT {
        tau_max *= 1.25;
    }
    let g = |tau: f64| {
        let (re, im, dth) = point(tau);
        re.exp() * (im.cos() - dth * im.sin()) * 2.0 * tau
    };
    let span = (s0 + tau_max * tau_max).min(60.0) - s0;
    let panels = (nu * span / std::f64::consts::PI).ceil() as usize + 4;
    total += composite_doubling(&g, 0.0, tau_max, panels, TOL).0;
    (offset, total)
}

/// `K_σ(y) = ∫₀^∞ e^{-y cosh u} cosh(σu) du` for real `σ`.
fn real_order(sigma: f64, y: f64) -> (f64, f64) {
    let g = |u: f64| {
        let h = (0.5 * u).sinh();
        (-2.0 * y * h * h).exp() * (sigma * u).cosh()
    };
    let mut u_max: f64 = 1.0;
    while {
        let h = (0.5 * u_max).sinh();
        2.0 * y * h * h - sigma * u_max < CUT
    } {
        u_max *= 1.25;
    }
    let panels = (2.0 * u_max).ceil() as usize + 2;
    (-y, composite_doubling(&g, 0.0, u_max, panels, TOL).0)
}
