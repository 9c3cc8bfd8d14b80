use num_complex::Complex64;

use super::mat::Mat2;
use super::ArithError;
use crate::dd::Dd;

/// A point `x + iy` of the upper half plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self, ArithError> {
        if y > 0.0 && y.is_finite() && x.is_finite() {
            Ok(UpperHalfPoint { x, y })
        } else {
            Err(ArithError::NotInUpperHalfPlane(y))
        }
    }

    pub fn i() -> Self {
        UpperHalfPoint { x: 0.0, y: 1.0 }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Result<Self, ArithError> {
        UpperHalfPoint::new(z.re, z.im)
    }

    pub fn translate(self, dx: f64) -> Self {
        UpperHalfPoint { x: self.x + dx, y: self.y }
    }

    /// `σ_w = (v^{1/2}, u v^{-1/2}; 0, v^{-1/2})`, so that `σ_w i = w`.
    pub fn sigma(self) -> [f64; 4] {
        let s = self.y.sqrt();
        [s, self.x / s, 0.0, 1.0 / s]
    }

    /// `σ_w⁻¹`.
    pub fn sigma_inv(self) -> [f64; 4] {
        let s = self.y.sqrt();
        [1.0 / s, -self.x / s, 0.0, s]
    }
}

/// Image of `z` under an integral `g` of determinant 1, with the real part
/// carried in double-double so that `n² Re(gz) mod 1` stays accurate.
pub fn act_precise(g: &[i64; 4], z: &UpperHalfPoint) -> (Dd, f64) {
    let [a, b, c, d] = g.map(|e| e as f64);
    let x = Dd::new(z.x);
    let y2 = Dd::prod(z.y, z.y);
    let cxd = Dd::new(c) * x + Dd::new(d);
    let cy = Dd::prod(c, z.y);
    let denom = cxd * cxd + cy * cy;
    let axb = Dd::new(a) * x + Dd::new(b);
    let num = axb * cxd + Dd::new(a) * Dd::new(c) * y2;
    let xr = num / denom;
    (xr, z.y / denom.to_f64())
}

/// Reduce `z` into the standard fundamental domain.
///
/// Returns `g ∈ SL₂(ℤ)` and `z' = g z` with `Re(z') ∈ [-1/2, 1/2)`, `|z'| ≥ 1`
/// and `Re(z') ≤ 0` when `|z'| = 1`.
pub fn reduce_point(z: &UpperHalfPoint) -> Result<(Mat2, UpperHalfPoint), ArithError> {
    if !(z.y > 0.0) {
        return Err(ArithError::NotInUpperHalfPlane(z.y));
    }
    let (mut x, mut y) = (z.x, z.y);
    // accumulated matrix, entries in i128 for headroom
    let mut g: [i128; 4] = [1, 0, 0, 1];
    let apply_t = |g: &mut [i128; 4], n: i128| {
        // T^n g
        g[0] += n * g[2];
        g[1] += n * g[3];
    };
    let apply_s = |g: &mut [i128; 4]| {
        // S g with S = (0,-1;1,0)
        *g = [-g[2], -g[3], g[0], g[1]];
    };
    for _ in 0..10_000 {
        let n = (x + 0.5).floor();
        if n != 0.0 {
            x -= n;
            apply_t(&mut g, -(n as i128));
        }
        let r2 = x * x + y * y;
        if r2 < 1.0 {
            x = -x / r2;
            y /= r2;
            apply_s(&mut g);
            continue;
        }
        if r2 == 1.0 && x > 0.0 {
            x = -x;
            apply_s(&mut g);
        }
        let m = Mat2::from_ints(
            g[0] as i64,
            g[1] as i64,
            g[2] as i64,
            g[3] as i64,
        );
        let exact = m.act(z);
        // keep the iterated point when recomputation drifts across a boundary
        let zr = if exact.x >= -0.5 && exact.x < 0.5 { exact } else { UpperHalfPoint { x, y: exact.y } };
        return Ok((m, zr));
    }
    Err(ArithError::ReductionStalled)
}

/// `htt(z) = max_{γ ∈ SL₂(ℤ)} Im(γz)`.
pub fn htt(z: &UpperHalfPoint) -> Result<f64, ArithError> {
    Ok(reduce_point(z)?.1.y)
}
