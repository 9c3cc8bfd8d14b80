use std::f64::consts::PI;

use rayon::prelude::*;

use super::cusps::{cusp_data, expected_widths};
use super::expansions::{HMember, Prepared, SharpForm};
use super::petersson::{act, tile_integral, QuadraturePolicy};
use super::series::{CoefficientSeries, SeriesKind};
use super::{check_prime, AutomorphicError};
use crate::arith::{CosetTable, GroupSpec, UpperHalfPoint};
use crate::special::quad::gl20;
use crate::special::{v0_functional, v_functional, SpectralParam};

fn check_height(t: f64) -> Result<(), AutomorphicError> {
    if t >= 1.0 && t.is_finite() {
        Ok(())
    } else {
        Err(AutomorphicError::InvalidArgument(format!("T = {t} must be at least 1")))
    }
}

/// `(pn, b(pn))` for the nonzero coefficients divisible by `p`.
fn multiples(series: &CoefficientSeries, p: u64) -> Vec<(i64, f64)> {
    let p = p as i64;
    series.coefficients().iter().filter(|(m, _)| *m % p == 0).map(|(m, b)| (*m, *b)).collect()
}

/// `R = Σ_n |b(pn)|² |n|^{-1/2} (1 + |n|T/p)^{-100}`.
pub fn compute_r(series: &CoefficientSeries, p: u64, t: f64) -> Result<f64, AutomorphicError> {
    series.require(SeriesKind::HalfIntegral)?;
    check_prime(p)?;
    check_height(t)?;
    let pf = p as f64;
    Ok(multiples(series, p)
        .iter()
        .map(|&(m, b)| {
            let n = (m / p as i64).abs() as f64;
            b * b / n.sqrt() * (1.0 + n * t / pf).powi(-100)
        })
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralPolicy {
    /// Panel width in `log y` for the height integral.
    pub s_width: f64,
    /// Gauss panels across the cusp width, for cusps without a trapezoid-exact
    /// expansion.
    pub x_panels: usize,
    /// Dyadic panels in `t = 1/y` for those cusps.
    pub levels: usize,
    /// Absolute bound aimed for above the height cutoff.
    pub tail_abs: f64,
}

impl Default for IntegralPolicy {
    fn default() -> Self {
        IntegralPolicy { s_width: 0.05, x_panels: 4, levels: 40, tail_abs: 1e-14 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CuspIntegral {
    pub which: usize,
    pub width: u64,
    /// Two-dimensional quadrature of `y^{1/2}|h♯|²` over the cusp box.
    pub quadrature: f64,
    /// Bound (cusps 1 to 3) or estimate (cusps 4 to 6) for the neglected part.
    pub quadrature_error: f64,
    /// `p^{1/2} Σ |b|² |n|^{-1/2} V(…)`, for cusps 1 to 3.
    pub formula: Option<f64>,
}

/// Coefficient side of `I(γ_j)`, `j ≤ 3`.
fn cusp_formula(
    series: &CoefficientSeries,
    p: u64,
    t: f64,
    which: usize,
) -> Result<f64, AutomorphicError> {
    let pi = p as i64;
    let pf = p as f64;
    // (coefficient, n, argument of V)
    let terms: Vec<(f64, f64, f64)> = series
        .coefficients()
        .iter()
        .filter_map(|(&m, &b)| match which {
            1 if m % pi == 0 => {
                let n = (m / pi) as f64;
                Some((b, n, n * t / pf))
            }
            2 if m % pi == 0 && m.rem_euclid(4) == 1 => {
                let n = (m / pi) as f64;
                Some((b, n, n * t / (4.0 * pf)))
            }
            3 if m % (4 * pi) == 0 => {
                let n = (m / (4 * pi)) as f64;
                Some((b, n, n * t / (4.0 * pf)))
            }
            _ => None,
        })
        .collect();
    let st = series.t();
    let vals = terms
        .par_iter()
        .map(|&(b, n, u)| Ok(b * b / n.abs().sqrt() * v_functional(st, u)?))
        .collect::<Result<Vec<f64>, AutomorphicError>>()?;
    Ok(pf.sqrt() * vals.iter().sum::<f64>())
}

fn cusp_member(p: u64, which: usize, form: SharpForm) -> HMember {
    match which {
        1 => HMember::Sharp { p, form },
        2 => HMember::EllSharp { ell: 2, p, form },
        _ => HMember::EllSharp { ell: 1, p, form },
    }
}

/// `∫_T^∞ y^{1/2} ∫_0^w |f(x+iy)|² dx dy/y²` for `f = h♯, h_2♯, h_1♯` from
/// the averaged form, trapezoid in `x` (exact for these trigonometric
/// polynomials) and Gauss in `log y`. The cutoff `Y` is raised until the
/// envelope tail `w S(Y)² Y^{-3/2} / (4π s_min)` is below `tail_abs`, where
/// `|f| ≤ S(Y) (y/Y)^{1/4} e^{-2π s_min (y-Y)}` for `y ≥ Y`.
fn cusp_box_quadrature(
    series: &CoefficientSeries,
    p: u64,
    t: f64,
    which: usize,
    width: u64,
    policy: &IntegralPolicy,
) -> Result<(f64, f64), AutomorphicError> {
    let w = width as f64;
    let expansion = |y: f64| Prepared::new(series, cusp_member(p, which, SharpForm::Expansion), y);
    let probe = expansion(1.0)?;
    let row = probe.row();
    let Some(n_min) = row.terms.iter().map(|t| t.0.unsigned_abs()).min() else {
        return Ok((0.0, 0.0));
    };
    let n_max = row.terms.iter().map(|t| t.0.unsigned_abs()).max().unwrap_or(1);
    // phases are e(n (x + …) inv) with inv = scale at y = 1
    let inv = row.scale;
    let s_min = n_min as f64 * inv;
    let n_x = (2.0 * n_max as f64 * inv * w).ceil() as usize + 8;

    let mut y_cut = (2.0 * t).max(t + 1.0);
    let tail = loop {
        let s = expansion(y_cut)?.abs_bound();
        let tail = w * s * s * y_cut.powf(-1.5) / (4.0 * PI * s_min);
        if tail <= policy.tail_abs {
            break tail;
        }
        if y_cut > 1e6 {
            return Err(AutomorphicError::TailNotClosed { cutoff: y_cut, tail, tol: policy.tail_abs });
        }
        y_cut *= 1.5;
    };

    let rule = gl20();
    let (lo, hi) = (t.ln(), y_cut.ln());
    let n = ((hi - lo) / policy.s_width).ceil().max(1.0) as usize;
    let hs = (hi - lo) / n as f64;
    let nodes: Vec<(f64, f64)> = (0..n)
        .flat_map(|k| {
            let a = lo + hs * k as f64;
            rule.nodes.iter().zip(&rule.weights).map(move |(x, wt)| (a + 0.5 * hs * (x + 1.0), 0.5 * hs * wt))
        })
        .collect();
    let member = cusp_member(p, which, SharpForm::Average);
    let parts = nodes
        .par_iter()
        .map(|&(s, wt)| {
            let y = s.exp();
            let prep = Prepared::new(series, member, y)?;
            series.check_tail(prep.tail(), y)?;
            let hx = w / n_x as f64;
            let box_x: f64 = (0..n_x).map(|k| prep.at(hx * k as f64).norm_sqr()).sum::<f64>() * hx;
            // y^{1/2} dy / y² = y^{-1/2} ds
            Ok(wt * y.powf(-0.5) * box_x)
        })
        .collect::<Result<Vec<f64>, AutomorphicError>>()?;
    Ok((parts.iter().sum(), tail))
}

/// `∫_T^∞ y^{1/2} ∫_0^w |h♯(γ(x+iy))|² dx dy/y²` in `t = 1/y`, on dyadic
/// panels toward `t = 0`. The error estimate is the last panel's share.
fn cusp_image_quadrature(
    series: &CoefficientSeries,
    p: u64,
    t: f64,
    gamma: [i64; 4],
    width: u64,
    policy: &IntegralPolicy,
) -> Result<(f64, f64), AutomorphicError> {
    let rule = gl20();
    let w = width as f64;
    let hx = w / policy.x_panels as f64;
    let xs: Vec<(f64, f64)> = (0..policy.x_panels)
        .flat_map(|k| {
            let a = hx * k as f64;
            rule.nodes.iter().zip(&rule.weights).map(move |(x, wt)| (a + 0.5 * hx * (x + 1.0), 0.5 * hx * wt))
        })
        .collect();
    let member = HMember::Sharp { p, form: SharpForm::Expansion };
    let panel = |level: usize| -> Result<f64, AutomorphicError> {
        let b = (0.5f64).powi(level as i32) / t;
        let a = 0.5 * b;
        let jobs: Vec<(f64, f64, f64, f64)> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .flat_map(|(n, wt)| {
                let tt = a + 0.5 * (b - a) * (n + 1.0);
                let wt = 0.5 * (b - a) * wt;
                xs.iter().map(move |&(x, wx)| (tt, wt, x, wx))
            })
            .collect();
        let vals = jobs
            .par_iter()
            .map(|&(tt, wt, x, wx)| {
                let z = act(&gamma, &UpperHalfPoint { x, y: 1.0 / tt });
                let prep = Prepared::new(series, member, z.y)?;
                series.check_tail(prep.tail(), z.y)?;
                // ∫ y^{1/2} G dy/y² = ∫ t^{-1/2} G(1/t) dt
                Ok(wt * wx * tt.powf(-0.5) * prep.at(z.x).norm_sqr())
            })
            .collect::<Result<Vec<f64>, AutomorphicError>>()?;
        Ok(vals.iter().sum())
    };
    let mut total = 0.0;
    let mut last = 0.0;
    for level in 0..policy.levels {
        last = panel(level)?;
        total += last;
    }
    Ok((total, last.abs()))
}

/// Both evaluations of `I(γ_j)`. For `j ≤ 3` the coefficient formula is
/// included; for `j ≥ 4` only the quadrature, of `|h♯(γ_j z)|²` from the
/// expansion of `h♯`.
pub fn compute_i_cusp(
    series: &CoefficientSeries,
    p: u64,
    t: f64,
    which: usize,
    policy: &IntegralPolicy,
) -> Result<CuspIntegral, AutomorphicError> {
    series.require(SeriesKind::HalfIntegral)?;
    check_prime(p)?;
    check_height(t)?;
    if !(1..=6).contains(&which) {
        return Err(AutomorphicError::InvalidArgument(format!("cusp index {which} not in 1..=6")));
    }
    let width = expected_widths(p)[which - 1];
    if which <= 3 {
        let formula = cusp_formula(series, p, t, which)?;
        let (quadrature, err) = cusp_box_quadrature(series, p, t, which, width, policy)?;
        Ok(CuspIntegral { which, width, quadrature, quadrature_error: err, formula: Some(formula) })
    } else {
        let gamma = cusp_data(p)?[which - 1].representative;
        let (quadrature, err) = cusp_image_quadrature(series, p, t, gamma, width, policy)?;
        Ok(CuspIntegral { which, width, quadrature, quadrature_error: err, formula: None })
    }
}

/// `I₀ = Σ_g ∫_{F, y ≤ T} y^{1/2} |h♯(gz)|² dμ` over coset representatives `g`
/// of `Γ₀(4/p)`, with `h♯` from its expansion.
pub fn compute_i0(
    series: &CoefficientSeries,
    p: u64,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<f64, AutomorphicError> {
    series.require(SeriesKind::HalfIntegral)?;
    check_prime(p)?;
    check_height(t)?;
    let table = CosetTable::build(GroupSpec::new(4, p)?)?;
    let reps: Vec<[i64; 4]> = (0..table.len()).map(|i| table.rep_i64(i)).collect();
    let member = HMember::Sharp { p, form: SharpForm::Expansion };
    tile_integral(
        &reps,
        &|g, z| {
            let gz = act(g, z);
            let prep = Prepared::new(series, member, gz.y)?;
            series.check_tail(prep.tail(), gz.y)?;
            Ok(z.y.sqrt() * prep.at(gz.x).norm_sqr())
        },
        t,
        policy.x_panels,
        policy.s_width,
    )
}

/// The `u₀` shipped with the moment chain; below `1/e`.
pub const SHIPPED_U0: f64 = 1e-2;

/// Lower bounds of `V₀(±u)/log(1/u)` measured on a geometric grid
/// `u ∈ [1e-8, u₀]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainConstants {
    pub u0: f64,
    pub lower_pos: f64,
    pub lower_neg: f64,
}

pub fn measure_chain_constants(t: SpectralParam, u0: f64) -> Result<ChainConstants, AutomorphicError> {
    if !(u0 > 1e-8 && u0 < (-1f64).exp()) {
        return Err(AutomorphicError::InvalidArgument(format!("u₀ = {u0} not in (1e-8, 1/e)")));
    }
    let k = 33;
    let grid: Vec<f64> = (0..k)
        .map(|i| (1e-8f64.ln() + (u0.ln() - 1e-8f64.ln()) * i as f64 / (k - 1) as f64).exp())
        .collect();
    let ratios = |sign: f64| -> Result<f64, AutomorphicError> {
        let r = grid
            .par_iter()
            .map(|&u| Ok(v0_functional(t, sign * u)? / (1.0 / u).ln()))
            .collect::<Result<Vec<f64>, AutomorphicError>>()?;
        Ok(r.into_iter().fold(f64::INFINITY, f64::min))
    };
    Ok(ChainConstants { u0, lower_pos: ratios(1.0)?, lower_neg: ratios(-1.0)? })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadMoment {
    /// `(1/Cp) Σ_{|n| ≤ Cp} |b(pn)|² (1 + log(Cp/|n|))`.
    pub log_weighted: f64,
    /// `(1/Cp) Σ_n |b(pn)|² V₀(u₀ n/(Cp))`.
    pub v0_weighted: f64,
    /// The log-weighted sum with each term scaled by the measured lower
    /// constant for its sign.
    pub chain_lower: f64,
    pub constants: ChainConstants,
    /// `v0_weighted ≥ chain_lower`.
    pub chain_holds: bool,
}

pub fn quad_moment_functional(
    series: &CoefficientSeries,
    p: u64,
    c: f64,
) -> Result<QuadMoment, AutomorphicError> {
    series.require(SeriesKind::HalfIntegral)?;
    check_prime(p)?;
    if !(c >= 1.0 && c.is_finite()) {
        return Err(AutomorphicError::InvalidArgument(format!("C = {c} must be at least 1")));
    }
    let constants = measure_chain_constants(series.t(), SHIPPED_U0)?;
    let cp = c * p as f64;
    let terms: Vec<(f64, f64)> =
        multiples(series, p).iter().map(|&(m, b)| ((m / p as i64) as f64, b * b)).collect();
    let mut log_weighted = 0.0;
    let mut chain_lower = 0.0;
    for &(n, b2) in &terms {
        if n.abs() <= cp {
            let w = 1.0 + (cp / n.abs()).ln();
            log_weighted += b2 * w;
            chain_lower += b2 * w * if n > 0.0 { constants.lower_pos } else { constants.lower_neg };
        }
    }
    let st = series.t();
    let v0 = terms
        .par_iter()
        .map(|&(n, b2)| Ok(b2 * v0_functional(st, constants.u0 * n / cp)?))
        .collect::<Result<Vec<f64>, AutomorphicError>>()?;
    let v0_weighted = v0.iter().sum::<f64>() / cp;
    log_weighted /= cp;
    chain_lower /= cp;
    Ok(QuadMoment {
        log_weighted,
        v0_weighted,
        chain_lower,
        constants,
        chain_holds: v0_weighted >= chain_lower,
    })
}
