use num_complex::Complex64;

use super::gamma::ln_gamma;
use super::quad::{adaptive, composite};
use super::SpecialError;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_kappa(kappa: f64) -> Result<(), SpecialError> {
    if kappa == 0.0 || kappa == 0.25 || kappa == -0.25 {
        Ok(())
    } else {
        Err(SpecialError::UnsupportedKappa(kappa))
    }
}

/// Normalize `μ` to `iν` or a real `μ ∈ [0, 1/4)`; `W` is even in `μ`.
fn normalize_mu(mu: Complex64) -> Result<Complex64, SpecialError> {
    if mu.re == 0.0 {
        Ok(c(0.0, mu.im))
    } else if mu.im == 0.0 && mu.re.abs() < 0.25 {
        Ok(c(mu.re.abs(), 0.0))
    } else {
        Err(SpecialError::UnsupportedMu(mu))
    }
}

/// Classical Whittaker `W_{κ,μ}(z)` for `κ ∈ {0, ±1/4}` and imaginary
/// (or small real) `μ`.
pub fn whittaker_w(kappa: f64, mu: Complex64, z: f64) -> Result<f64, SpecialError> {
    check_kappa(kappa)?;
    let mu = normalize_mu(mu)?;
    if !(z > 0.0) {
        return Err(SpecialError::NonPositive(z));
    }
    if mu.im.abs() >= 0.25 && z <= 8.0f64.max(2.0 * mu.im.abs()) {
        Ok(connection(kappa, mu, z))
    } else {
        Ok(laplace(kappa, mu, z))
    }
}

/// A bound for `|W_{κ,μ}(z)|`: `Γ(1/2-κ) / |Γ(1/2-κ+iν)| · z^κ e^{-z/2}` for
/// `μ = iν`, and `z^κ e^{-z/2}` for real `μ`.
pub fn whittaker_w_envelope(kappa: f64, mu: Complex64, z: f64) -> Result<f64, SpecialError> {
    check_kappa(kappa)?;
    if normalize_mu(mu)?.re != 0.0 {
        return Ok((kappa * z.ln() - 0.5 * z).exp());
    }
    let num = ln_gamma(c(0.5 - kappa, 0.0)).re;
    let den = ln_gamma(c(0.5 - kappa, mu.im)).re;
    Ok((num - den + kappa * z.ln() - 0.5 * z).exp())
}

/// `2|Γ(2μ)/Γ(1/2+μ-κ)|`, the amplitude of `W_{κ,iν}(z)/√z` as `z → 0`.
pub fn small_amplitude(kappa: f64, mu: Complex64) -> f64 {
    2.0 * (ln_gamma(2.0 * mu) - ln_gamma(0.5 + mu - kappa)).re.exp()
}

/// `W = 2 Re[Γ(-2μ)/Γ(1/2-μ-κ) M_{κ,μ}(z)]`, the two `M` terms being conjugate.
fn connection(kappa: f64, mu: Complex64, z: f64) -> f64 {
    let a = 0.5 + mu - kappa;
    let b = 1.0 + 2.0 * mu;
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    let mut k = 0.0;
    loop {
        term = term * (a + k) / (b + k) * (z / (k + 1.0));
        sum += term;
        k += 1.0;
        if k > z && term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    let log_pref = ln_gamma(-2.0 * mu) - ln_gamma(0.5 - mu - kappa) - 0.5 * z + (0.5 + mu) * z.ln();
    2.0 * (log_pref.exp() * sum).re
}

/// `W = z^{μ+1/2} e^{-z/2} / Γ(a) ∫₀^{∞e^{iφ}} e^{-zs} s^{a-1} (1+s)^b ds`
/// with `a = 1/2+μ-κ`, `b = μ+κ-1/2`, on a ray rotated against the
/// oscillation of `s^{iν}`.
fn laplace(kappa: f64, mu: Complex64, z: f64) -> f64 {
    let a = 0.5 + mu - kappa;
    let b = mu + kappa - 0.5;
    let nu = mu.im;
    let phi = nu.signum() * (1.2 * (2.0 * nu.abs() + 4.0) / z).clamp(0.0, 1.2);
    let phi = if nu == 0.0 { 0.0 } else { phi };
    let dir = c(phi.cos(), phi.sin());
    let s0 = 0.5f64.min(1.0 / z).min(3.0 / (1.0 + b.norm()));
    let omega = dir * s0;

    // head: Σ_k c_k ω^{a+k}/(a+k), c_k from e^{-zs}(1+s)^b
    let mut e = vec![c(1.0, 0.0)];
    let mut g = vec![c(1.0, 0.0)];
    let mut head = c(0.0, 0.0);
    let mut small = 0;
    for k in 0..400usize {
        if k > 0 {
            let kf = k as f64;
            e.push(e[k - 1] * (-z) * omega / kf);
            g.push(g[k - 1] * (b - (kf - 1.0)) * omega / kf);
        }
        let ck: Complex64 = (0..=k).map(|j| e[j] * g[k - j]).sum();
        let term = ck / (a + k as f64);
        head += term;
        if term.norm() < 1e-18 * head.norm() {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    head *= (a * omega.ln()).exp();

    // tail on σ = s₀ e^v
    let integrand = |v: f64| {
        let s = omega * v.exp();
        (-z * s + a * s.ln() + b * (1.0 + s).ln()).exp()
    };
    let sigma_max = s0 + (60.0 + 2.0 * nu.abs()) / (z * phi.cos());
    let v_max = (sigma_max / s0).ln().max(1e-3);
    let rough = composite(&integrand, 0.0, v_max, 16);
    let tol = 1e-14 * head.norm().max(rough.norm());
    let tail = adaptive(&integrand, 0.0, v_max, tol);

    let log_pref = (mu + 0.5) * z.ln() - 0.5 * z - ln_gamma(a);
    (log_pref.exp() * (head + tail)).re
}
