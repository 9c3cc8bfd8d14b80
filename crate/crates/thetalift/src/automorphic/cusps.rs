use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;

use super::{check_prime, AutomorphicError};
use crate::arith::{CosetTable, GroupSpec, Mat2, UpperHalfPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cusp {
    Infinity,
    /// `num/den` in lowest terms, `den > 0`.
    Rational { num: i64, den: i64 },
}

impl Cusp {
    fn of(a: i64, c: i64) -> Cusp {
        if c == 0 {
            return Cusp::Infinity;
        }
        let g = a.gcd(&c);
        let s = c.signum();
        Cusp::Rational { num: s * a / g, den: s * c / g }
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cusp::Infinity => write!(f, "∞"),
            Cusp::Rational { num, den: 1 } => write!(f, "{num}"),
            Cusp::Rational { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspDatum {
    pub representative: [i64; 4],
    pub cusp: Cusp,
    pub width: u64,
}

/// `(p, p, 4p, 1, 1, 4)`.
pub fn expected_widths(p: u64) -> [u64; 6] {
    [p, p, 4 * p, 1, 1, 4]
}

/// Smallest `h ≥ 1` with `γ T^h γ⁻¹ ∈ Γ₀(4/p)`, i.e. `p | h a²` and `4 | h c²`.
pub fn width_by_formula(a: i64, c: i64, p: u64) -> u64 {
    let a2 = (a as i128 * a as i128).unsigned_abs();
    let c2 = (c as i128 * c as i128).unsigned_abs();
    let from_p = p as u128 / (p as u128).gcd(&a2);
    let from_4 = 4 / 4u128.gcd(&c2);
    from_p.lcm(&from_4) as u64
}

/// Complete a coprime first column `(a, c)` to an element of `SL₂(ℤ)`.
fn complete_column(a: i64, c: i64) -> [i64; 4] {
    let e = a.extended_gcd(&c);
    let (x, y) = if e.gcd == 1 { (e.x, e.y) } else { (-e.x, -e.y) };
    // a x + c y = 1
    [a, -y, c, x]
}

/// The six cusps `∞, 1/2, 1, p/4, p/2, p` of `Γ₀(4/p)` with widths read off
/// from `T`-orbits on the coset table, cross-checked against
/// [`width_by_formula`] and the expected table, and certified inequivalent by
/// landing in distinct orbits.
pub fn cusp_data(p: u64) -> Result<Vec<CuspDatum>, AutomorphicError> {
    check_prime(p)?;
    let fail = |reason: String| AutomorphicError::CuspTable { p, reason };
    let table = CosetTable::build(GroupSpec::new(4, p)?)?;
    let orbits = table.t_orbits();
    let mut orbit_of = vec![0usize; table.len()];
    for (k, orbit) in orbits.iter().enumerate() {
        for &i in orbit {
            orbit_of[i] = k;
        }
    }
    if orbits.len() != 6 {
        return Err(fail(format!("{} cusps found", orbits.len())));
    }
    let pi = p as i64;
    let columns = [(1, 0), (1, 2), (1, 1), (pi, 4), (pi, 2), (pi, 1)];
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for (j, &(a, c)) in columns.iter().enumerate() {
        let g = complete_column(a, c);
        let idx = table
            .index_of(&Mat2::from_ints(g[0], g[1], g[2], g[3]))
            .ok_or_else(|| fail(format!("{g:?} not found among cosets")))?;
        let orbit = orbit_of[idx];
        if seen.contains(&orbit) {
            return Err(fail(format!("γ_{} shares a cusp with an earlier one", j + 1)));
        }
        seen.push(orbit);
        let width = orbits[orbit].len() as u64;
        let formula = width_by_formula(a, c, p);
        if width != formula {
            return Err(fail(format!("γ_{}: orbit width {width}, formula {formula}", j + 1)));
        }
        if width != expected_widths(p)[j] {
            return Err(fail(format!(
                "γ_{}: width {width}, expected {}",
                j + 1,
                expected_widths(p)[j]
            )));
        }
        out.push(CuspDatum { representative: g, cusp: Cusp::of(a, c), width });
    }
    let total: u64 = out.iter().map(|d| d.width).sum();
    if total as usize != table.len() {
        return Err(fail(format!("widths sum to {total}, index is {}", table.len())));
    }
    Ok(out)
}

/// Number of points of the strip `{0 ≤ x < p, y ≥ y₀}` in the `Γ₀(4/p)`-orbit
/// of `w`: bottom rows `±(c, d)` with `4 | c`, `p ∤ d`, `gcd(c, d) = 1` and
/// `|cw + d|² ≤ Im w / y₀`.
pub fn fiber_count(p: u64, w: &UpperHalfPoint, y0: f64) -> u64 {
    let pi = p as i64;
    let bound = w.y / y0;
    let mut count = u64::from(bound >= 1.0);
    let mut c = 4i64;
    loop {
        let cf = c as f64;
        let rest = bound - cf * cf * w.y * w.y;
        if rest < 0.0 {
            break;
        }
        let r = rest.sqrt();
        let centre = -cf * w.x;
        let lo = (centre - r).ceil() as i64;
        let hi = (centre + r).floor() as i64;
        for d in lo..=hi {
            if d.rem_euclid(pi) != 0 && c.gcd(&d) == 1 {
                count += 1;
            }
        }
        c += 4;
    }
    count
}

/// Largest [`fiber_count`] over an `nx × ny` grid of the strip with
/// `y ∈ [y₀, 1]` spaced geometrically.
pub fn max_fiber_count(p: u64, y0: f64, nx: usize, ny: usize) -> (u64, UpperHalfPoint) {
    let pts: Vec<UpperHalfPoint> = (0..nx)
        .flat_map(|i| {
            (0..ny).map(move |j| UpperHalfPoint {
                x: p as f64 * (i as f64 + 0.5) / nx as f64,
                y: y0 * (1.0 / y0).powf(j as f64 / ny.max(2).saturating_sub(1) as f64),
            })
        })
        .collect();
    let counts: Vec<u64> = pts.par_iter().map(|w| fiber_count(p, w, y0)).collect();
    let (k, best) = counts
        .iter()
        .enumerate()
        .fold((0, 0), |(bk, bv), (k, &v)| if v > bv { (k, v) } else { (bk, bv) });
    (best, pts[k])
}
