use num_complex::Complex64;
use rayon::prelude::*;

use super::AutomorphicError;
use crate::arith::{CosetTable, GroupSpec, UpperHalfPoint};
use crate::special::quad::{composite, gl20};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraturePolicy {
    /// Gauss panels across `x ∈ [-1/2, 1/2]`.
    pub x_panels: usize,
    /// Largest panel width in `log y`.
    pub s_width: f64,
    /// Height `Y` above which the integrand is replaced by its envelope.
    pub cutoff: f64,
    pub tail_tolerance: f64,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        QuadraturePolicy { x_panels: 4, s_width: 0.05, cutoff: 1e8, tail_tolerance: 1e-7 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeterssonValue {
    /// Normalized integral over `y ≤ Y`.
    pub value: f64,
    /// Bound for the normalized contribution of `y > Y`.
    pub tail_bound: f64,
    pub index: u64,
}

pub(crate) fn act(g: &[i64; 4], z: &UpperHalfPoint) -> UpperHalfPoint {
    let [a, b, c, d] = g.map(|e| e as f64);
    let zc = Complex64::new(z.x, z.y);
    let w = (a * zc + b) / (c * zc + d);
    UpperHalfPoint { x: w.re, y: w.im }
}

/// `Σ_g ∫_{F, y ≤ y_max} f(g, z) dx dy/y²` over the standard fundamental
/// domain `F`, with `y = e^s` on panels of width at most `s_width`.
pub(crate) fn tile_integral<F>(
    reps: &[[i64; 4]],
    f: &F,
    y_max: f64,
    x_panels: usize,
    s_width: f64,
) -> Result<f64, AutomorphicError>
where
    F: Fn(&[i64; 4], &UpperHalfPoint) -> Result<f64, AutomorphicError> + Sync,
{
    let rule = gl20();
    let h = 1.0 / x_panels as f64;
    let xs: Vec<(f64, f64)> = (0..x_panels)
        .flat_map(|k| {
            let lo = -0.5 + h * k as f64;
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(move |(n, w)| (lo + 0.5 * h * (n + 1.0), 0.5 * h * w))
        })
        .collect();
    let jobs: Vec<(usize, usize)> =
        (0..reps.len()).flat_map(|g| (0..xs.len()).map(move |i| (g, i))).collect();
    let parts = jobs
        .par_iter()
        .map(|&(g, i)| {
            let (x, wx) = xs[i];
            let lo = (1.0 - x * x).sqrt().ln();
            let hi = y_max.ln();
            if hi <= lo {
                return Ok(0.0);
            }
            let n = ((hi - lo) / s_width).ceil().max(1.0) as usize;
            let hs = (hi - lo) / n as f64;
            let mut acc = 0.0;
            for k in 0..n {
                let a = lo + hs * k as f64;
                for (node, w) in rule.nodes.iter().zip(&rule.weights) {
                    let s = a + 0.5 * hs * (node + 1.0);
                    let y = s.exp();
                    acc += 0.5 * hs * w * (-s).exp() * f(&reps[g], &UpperHalfPoint { x, y })?;
                }
            }
            Ok(wx * acc)
        })
        .collect::<Result<Vec<f64>, AutomorphicError>>()?;
    Ok(parts.iter().sum())
}

/// `[PSL₂(ℤ) : Γ̄]⁻¹ ∫_{Γ\ℍ} F dμ` by tiling `Γ\ℍ` with `g F`, `g` over the
/// coset representatives, integrating up to `policy.cutoff` and bounding the
/// rest with `envelope`, a bound for `|F(gz)|` at height `y ≥ Y`.
pub fn petersson_quadrature<F>(
    f: F,
    envelope: Option<&(dyn Fn(f64) -> f64 + Sync)>,
    spec: GroupSpec,
    policy: &QuadraturePolicy,
) -> Result<PeterssonValue, AutomorphicError>
where
    F: Fn(&UpperHalfPoint) -> f64 + Sync,
{
    let envelope = envelope.ok_or(AutomorphicError::MissingEnvelope { cutoff: policy.cutoff })?;
    // ∫_Y^∞ E(y) dy/y² = ∫_0^{1/Y} E(1/t) dt
    let tail = composite(&|t: f64| envelope(1.0 / t), 0.0, 1.0 / policy.cutoff, 8);
    if !(tail <= policy.tail_tolerance) {
        return Err(AutomorphicError::TailNotClosed {
            cutoff: policy.cutoff,
            tail,
            tol: policy.tail_tolerance,
        });
    }
    let table = CosetTable::build(spec)?;
    let reps: Vec<[i64; 4]> = (0..table.len()).map(|i| table.rep_i64(i)).collect();
    let total = tile_integral(
        &reps,
        &|g, z| Ok(f(&act(g, z))),
        policy.cutoff,
        policy.x_panels,
        policy.s_width,
    )?;
    let index = reps.len() as u64;
    Ok(PeterssonValue { value: total / index as f64, tail_bound: tail, index })
}
