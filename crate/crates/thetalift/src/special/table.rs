//! Piecewise Chebyshev interpolant of `W(y) e^{2π|y|}` in `log|y|`, covering
//! the range where the direct evaluation takes the slow integral route.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::{w_h, SpecialError, SpectralParam};

const DEGREE: usize = 20;
const PANEL: f64 = 0.05;

/// Interpolation table for `W` on `0.5 ≤ |y| ≤ 64`; outside it evaluation
/// falls through to [`w_h`]. Immutable once built.
#[derive(Debug)]
pub struct WhTable {
    t: SpectralParam,
    lo: f64,
    hi: f64,
    pos: Vec<[f64; DEGREE]>,
    neg: Vec<[f64; DEGREE]>,
}

fn cheb_nodes() -> [f64; DEGREE] {
    std::array::from_fn(|k| (PI * (k as f64 + 0.5) / DEGREE as f64).cos())
}

impl WhTable {
    pub fn new(t: SpectralParam) -> Result<Self, SpecialError> {
        let lo = 0.5f64.ln();
        let panels = ((64f64.ln() - lo) / PANEL).round() as usize;
        let hi = lo + PANEL * panels as f64;
        let build = |sign: f64| -> Result<Vec<[f64; DEGREE]>, SpecialError> {
            (0..panels)
                .into_par_iter()
                .map(|k| {
                    let a = lo + PANEL * k as f64;
                    let nodes = cheb_nodes();
                    let mut vals = [0.0; DEGREE];
                    for (v, x) in vals.iter_mut().zip(nodes) {
                        let y = (a + 0.5 * PANEL * (x + 1.0)).exp();
                        *v = w_h(t, sign * y)? * (2.0 * PI * y).exp();
                    }
                    let mut coef = [0.0; DEGREE];
                    for (j, c) in coef.iter_mut().enumerate() {
                        let s: f64 = (0..DEGREE)
                            .map(|k| {
                                vals[k] * (PI * j as f64 * (k as f64 + 0.5) / DEGREE as f64).cos()
                            })
                            .sum();
                        *c = s * 2.0 / DEGREE as f64;
                    }
                    coef[0] *= 0.5;
                    Ok(coef)
                })
                .collect()
        };
        Ok(WhTable { t, lo, hi, pos: build(1.0)?, neg: build(-1.0)? })
    }

    /// Table for `t`, built on first use and shared afterwards.
    pub fn shared(t: SpectralParam) -> Result<Arc<WhTable>, SpecialError> {
        static CACHE: OnceLock<Mutex<Vec<Arc<WhTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(tab) = guard.iter().find(|tab| tab.t == t) {
            return Ok(Arc::clone(tab));
        }
        let tab = Arc::new(WhTable::new(t)?);
        guard.push(Arc::clone(&tab));
        Ok(tab)
    }

    pub fn t(&self) -> SpectralParam {
        self.t
    }

    /// `W(y)`.
    pub fn eval(&self, y: f64) -> Result<f64, SpecialError> {
        let a = y.abs();
        let s = a.ln();
        if !(s >= self.lo && s < self.hi) {
            return w_h(self.t, y);
        }
        let k = (((s - self.lo) / PANEL) as usize).min(self.pos.len() - 1);
        let coef = if y > 0.0 { &self.pos[k] } else { &self.neg[k] };
        let x = 2.0 * (s - (self.lo + PANEL * k as f64)) / PANEL - 1.0;
        // Clenshaw
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in coef.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        Ok((x * b1 - b2 + coef[0]) * (-2.0 * PI * a).exp())
    }
}
