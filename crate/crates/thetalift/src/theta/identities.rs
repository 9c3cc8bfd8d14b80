use num_complex::Complex64;

use super::{
    jacobi_theta, theta_kernel, theta_kernel_shifted, theta_lattice, theta_lattice_shifted,
    theta_sharp, ThetaError, TruncationPolicy,
};
use crate::arith::UpperHalfPoint;
use crate::lattices::LatticeSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `θ♯(w,z) = p θ(z) (p^{-1/2} Σ_j θ(w, (z+pj)/p²) + θ(w,z))`
    Pushforward,
    /// `θ(R(p); w₁, w₂, -1/z) = p⁻¹ θ(R(1/p); w₁, w₂, z)`
    Fricke,
    /// `θ(R(1/p); w₁, w₂, z) = Σ_{j mod 4} θ(S(1/p); w₁, w₂, (z+pj)/4)`
    Mod4Split,
}

impl Identity {
    pub const ALL: [Identity; 3] = [Identity::Pushforward, Identity::Fricke, Identity::Mod4Split];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::Pushforward => "pushforward",
            Identity::Fricke => "fricke",
            Identity::Mod4Split => "mod4split",
        }
    }
}

/// Both sides of an identity at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub p: u64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// Sum of the certified truncation tails entering both sides.
    pub tail: f64,
    /// `lhs / rhs`, the constant a mismatched normalization would show.
    pub ratio: Complex64,
}

fn pt(x: f64, y: f64) -> UpperHalfPoint {
    UpperHalfPoint { x, y }
}

/// Eight fixed `(w, z)` pairs with imaginary parts in `[0.5, 3]`.
pub fn published_grid() -> Vec<(UpperHalfPoint, UpperHalfPoint)> {
    vec![
        (pt(0.0, 1.0), pt(0.0, 2.0)),
        (pt(0.0, 1.0), pt(1.0, 1.0)),
        (pt(0.3, 1.2), pt(0.1, 0.8)),
        (pt(-0.4, 0.9), pt(0.25, 1.5)),
        (pt(0.5, 2.0), pt(-0.3, 0.6)),
        (pt(0.2, 0.7), pt(0.45, 3.0)),
        (pt(-0.1, 1.6), pt(-0.45, 0.5)),
        (pt(0.35, 2.5), pt(0.05, 1.1)),
    ]
}

/// The published grid and eight more pairs.
pub fn fine_grid() -> Vec<(UpperHalfPoint, UpperHalfPoint)> {
    let mut g = published_grid();
    g.extend([
        (pt(0.15, 1.05), pt(-0.2, 0.7)),
        (pt(-0.3, 1.4), pt(0.4, 0.9)),
        (pt(0.45, 0.6), pt(0.3, 2.2)),
        (pt(-0.5, 1.1), pt(-0.1, 1.8)),
        (pt(0.05, 2.8), pt(0.2, 0.55)),
        (pt(0.25, 0.95), pt(-0.35, 1.3)),
        (pt(-0.15, 1.9), pt(0.1, 2.6)),
        (pt(0.4, 1.3), pt(-0.05, 0.75)),
    ]);
    g
}

/// Second upper-half-plane argument paired with a grid point `w`.
pub fn second_point(w: &UpperHalfPoint) -> UpperHalfPoint {
    pt(w.x + 0.2, 0.8 * w.y + 0.2)
}

pub fn verify_identity(
    which: Identity,
    p: u64,
    w1: &UpperHalfPoint,
    w2: &UpperHalfPoint,
    z: &UpperHalfPoint,
    pol: &TruncationPolicy,
) -> Result<IdentityCheck, ThetaError> {
    let pf = p as f64;
    let (lhs, rhs, tail) = match which {
        Identity::Pushforward => {
            let lhs = theta_sharp(w1, z, p, pol)?;
            let tz = jacobi_theta(z, pol)?;
            let base = pt(z.x / (pf * pf), z.y / (pf * pf));
            let mut inner = Complex64::new(0.0, 0.0);
            let mut inner_tail = 0.0;
            for j in 0..p as i64 {
                let v = theta_kernel_shifted(w1, &base, (j, p as i64), pol)?;
                inner += v.value;
                inner_tail += v.tail_bound;
            }
            let t0 = theta_kernel(w1, z, pol)?;
            let bracket = inner / pf.sqrt() + t0.value;
            let bracket_tail = inner_tail / pf.sqrt() + t0.tail_bound;
            let rhs = pf * tz.value * bracket;
            let rhs_tail = pf * ((tz.value.norm() + tz.tail_bound) * bracket_tail + tz.tail_bound * bracket.norm());
            (lhs.value, rhs, lhs.tail_bound + rhs_tail)
        }
        Identity::Fricke => {
            let zi = z.to_complex().inv() * -1.0;
            let fz = UpperHalfPoint::from_complex(zi)?;
            let lhs = theta_lattice(&LatticeSpec::r(p, 1), w1, w2, &fz, pol)?;
            let rhs = theta_lattice(&LatticeSpec::r(1, p), w1, w2, z, pol)?;
            (lhs.value, rhs.value / pf, lhs.tail_bound + rhs.tail_bound / pf)
        }
        Identity::Mod4Split => {
            let lhs = theta_lattice(&LatticeSpec::r(1, p), w1, w2, z, pol)?;
            let base = pt(z.x / 4.0, z.y / 4.0);
            let mut rhs = Complex64::new(0.0, 0.0);
            let mut tail = lhs.tail_bound;
            for j in 0..4 {
                let v = theta_lattice_shifted(&LatticeSpec::s(1, p), w1, w2, &base, (p as i64 * j, 4), pol)?;
                rhs += v.value;
                tail += v.tail_bound;
            }
            (lhs.value, rhs, tail)
        }
    };
    Ok(IdentityCheck { identity: which, p, lhs, rhs, residual: (lhs - rhs).norm(), tail, ratio: lhs / rhs })
}
