//! Complex log-gamma by upward recurrence and the Stirling series.

use num_complex::Complex64;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Γ(z)` on some branch; `exp` of it is `Γ(z)`. Poles give non-finite output.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 12.0 {
        shift += z.ln();
        z += 1.0;
    }
    let zi = z.inv();
    let zi2 = zi * zi;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = zi;
    for c in STIRLING {
        series += pow * c;
        pow *= zi2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series - shift
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `|Γ(z)|` for real-part-positive or moderate arguments.
pub fn abs_gamma(z: Complex64) -> f64 {
    ln_gamma(z).re.exp()
}
