//! Gauss–Legendre rules and composite or adaptive quadrature built on them.

use std::ops::{Add, Mul};
use std::sync::OnceLock;

use num_complex::Complex64;

/// Values that can be integrated: reals and complex numbers.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Newton iteration on `P_n` from the Tricomi initial guesses.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussRule { nodes, weights }
    }

    pub fn integrate<T: Integrand>(&self, f: impl Fn(f64) -> T, a: f64, b: f64) -> T {
        let h = 0.5 * (b - a);
        let m = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + f(m + h * x) * (w * h))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn gl10() -> &'static GaussRule {
    static R: OnceLock<GaussRule> = OnceLock::new();
    R.get_or_init(|| GaussRule::new(10))
}

pub fn gl20() -> &'static GaussRule {
    static R: OnceLock<GaussRule> = OnceLock::new();
    R.get_or_init(|| GaussRule::new(20))
}

/// 20-point Gauss–Legendre on `panels` equal panels of `[a, b]`.
pub fn composite<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64, panels: usize) -> T {
    let h = (b - a) / panels as f64;
    (0..panels).fold(T::zero(), |acc, k| {
        let lo = a + h * k as f64;
        acc + gl20().integrate(f, lo, lo + h)
    })
}

/// [`composite`] with the panel count doubled until two successive values
/// agree to `tol` (absolute). Returns the value and the last difference.
pub fn composite_doubling<T: Integrand>(
    f: &impl Fn(f64) -> T,
    a: f64,
    b: f64,
    panels: usize,
    tol: f64,
) -> (T, f64) {
    let mut n = panels.max(1);
    let mut prev = composite(f, a, b, n);
    let mut diff = f64::INFINITY;
    for _ in 0..8 {
        n *= 2;
        let next = composite(f, a, b, n);
        diff = (next + prev * -1.0).magnitude();
        prev = next;
        if diff <= tol {
            break;
        }
    }
    (prev, diff)
}

/// Adaptive bisection comparing the 20- and 10-point rules.
pub fn adaptive<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64, tol: f64) -> T {
    fn go<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64, tol: f64, depth: u32) -> T {
        let fine = gl20().integrate(f, a, b);
        let coarse = gl10().integrate(f, a, b);
        if depth == 0 || (fine + coarse * -1.0).magnitude() <= tol {
            return fine;
        }
        let m = 0.5 * (a + b);
        go(f, a, m, 0.5 * tol, depth - 1) + go(f, m, b, 0.5 * tol, depth - 1)
    }
    go(f, a, b, tol, 16)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials_exactly() {
        for n in [5, 10, 20, 33] {
            let r = GaussRule::new(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14);
            let deg = 2 * n - 1;
            let v = r.integrate(|x: f64| x.powi(deg as i32 - 1), 0.0, 1.0);
            assert!((v - 1.0 / (deg as f64)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn adaptive_handles_peaks() {
        let v = adaptive(&|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12);
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-9 * exact);
    }
}
