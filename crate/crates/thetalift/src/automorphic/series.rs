use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::AutomorphicError;
use crate::special::{maass_whittaker, w_h_envelope, SpectralParam, WhTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// `λ(n)`, `n ≥ 1`, extended to `n < 0` by parity.
    MaassIntegral,
    /// `b(n)` supported on `n ≡ 0, 1 (mod 4)`, both signs.
    HalfIntegral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// What is assumed about coefficients past `support_bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailModel {
    /// Unknown, bounded by the largest supplied `|b|`.
    Envelope,
    /// Zero: a finite synthetic series.
    Vanishing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSeries {
    kind: SeriesKind,
    parity: Parity,
    coeffs: BTreeMap<i64, f64>,
    t: SpectralParam,
    support_bound: u64,
    tail_model: TailModel,
    tail_tolerance: f64,
}

impl CoefficientSeries {
    /// Maass coefficients `λ(n)`; requires `λ(1) = 1`.
    pub fn maass(
        t: SpectralParam,
        coeffs: impl IntoIterator<Item = (u64, f64)>,
    ) -> Result<Self, AutomorphicError> {
        let mut map = BTreeMap::new();
        for (n, v) in coeffs {
            if n == 0 {
                return Err(AutomorphicError::InvalidSeries {
                    invariant: "indices are nonzero",
                    detail: "λ(0) given".into(),
                });
            }
            check_finite(n as i64, v)?;
            if v != 0.0 {
                map.insert(n as i64, v);
            }
        }
        if map.get(&1) != Some(&1.0) {
            return Err(AutomorphicError::InvalidSeries {
                invariant: "λ(1) = 1",
                detail: format!("λ(1) = {}", map.get(&1).copied().unwrap_or(0.0)),
            });
        }
        Ok(Self::assemble(SeriesKind::MaassIntegral, map, t))
    }

    /// Half-integral weight coefficients `b(n)`; nonzero values off
    /// `n ≡ 0, 1 (mod 4)` are rejected.
    pub fn half_integral(
        t: SpectralParam,
        coeffs: impl IntoIterator<Item = (i64, f64)>,
    ) -> Result<Self, AutomorphicError> {
        let mut map = BTreeMap::new();
        for (n, v) in coeffs {
            check_finite(n, v)?;
            if v == 0.0 {
                continue;
            }
            if n == 0 {
                return Err(AutomorphicError::InvalidSeries {
                    invariant: "indices are nonzero",
                    detail: "b(0) given".into(),
                });
            }
            if n.rem_euclid(4) > 1 {
                return Err(AutomorphicError::InvalidSeries {
                    invariant: "b(n) = 0 unless n ≡ 0, 1 (mod 4)",
                    detail: format!("b({n}) = {v}"),
                });
            }
            map.insert(n, v);
        }
        Ok(Self::assemble(SeriesKind::HalfIntegral, map, t))
    }

    fn assemble(kind: SeriesKind, coeffs: BTreeMap<i64, f64>, t: SpectralParam) -> Self {
        let support_bound = coeffs.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0);
        CoefficientSeries {
            kind,
            parity: Parity::Even,
            coeffs,
            t,
            support_bound,
            tail_model: TailModel::Envelope,
            tail_tolerance: 1e-12,
        }
    }

    pub fn with_parity(mut self, parity: Parity) -> Result<Self, AutomorphicError> {
        if self.kind != SeriesKind::MaassIntegral && parity == Parity::Odd {
            return Err(AutomorphicError::WrongKind { expected: "maass_integral" });
        }
        self.parity = parity;
        Ok(self)
    }

    /// Declare that all indices up to `bound` have been supplied.
    pub fn with_support_bound(mut self, bound: u64) -> Result<Self, AutomorphicError> {
        let max = self.coeffs.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0);
        if bound < max {
            return Err(AutomorphicError::InvalidSeries {
                invariant: "support_bound ≥ largest index",
                detail: format!("{bound} < {max}"),
            });
        }
        self.support_bound = bound;
        Ok(self)
    }

    pub fn with_tail_model(mut self, model: TailModel) -> Self {
        self.tail_model = model;
        self
    }

    pub fn with_tail_tolerance(mut self, tol: f64) -> Self {
        self.tail_tolerance = tol;
        self
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn t(&self) -> SpectralParam {
        self.t
    }

    pub fn support_bound(&self) -> u64 {
        self.support_bound
    }

    pub fn tail_model(&self) -> TailModel {
        self.tail_model
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Nonzero coefficients keyed by index (positive only for Maass series).
    pub fn coefficients(&self) -> &BTreeMap<i64, f64> {
        &self.coeffs
    }

    pub fn get(&self, n: i64) -> f64 {
        match self.kind {
            SeriesKind::HalfIntegral => self.coeffs.get(&n).copied().unwrap_or(0.0),
            SeriesKind::MaassIntegral => {
                let v = self.coeffs.get(&n.abs()).copied().unwrap_or(0.0);
                if n < 0 && self.parity == Parity::Odd {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn require(&self, kind: SeriesKind) -> Result<(), AutomorphicError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(AutomorphicError::WrongKind {
                expected: match kind {
                    SeriesKind::MaassIntegral => "maass_integral",
                    SeriesKind::HalfIntegral => "half_integral",
                },
            })
        }
    }

    /// Bound for `Σ_{|n| > N} |c(n)| |n|^{-1/2} |W(n s)|`.
    ///
    /// Both envelopes have the form `A |y|^{±1/4} e^{-2π|y|}` (or `e^{-2π|y|}`
    /// in the Maass case), so each summand is at most the one at `N` times
    /// `e^{-2π s (n-N)}`.
    pub(crate) fn tail_bound(&self, scale: f64) -> Result<f64, AutomorphicError> {
        let bmax = self.max_abs();
        if self.tail_model == TailModel::Vanishing || bmax == 0.0 {
            return Ok(0.0);
        }
        let n = self.support_bound.max(1) as f64;
        let r = (-2.0 * PI * scale).exp();
        let head = match self.kind {
            SeriesKind::MaassIntegral => 2.0 * (-2.0 * PI * n * scale).exp(),
            SeriesKind::HalfIntegral => {
                w_h_envelope(self.t, n * scale)? + w_h_envelope(self.t, -n * scale)?
            }
        };
        Ok(bmax * head / n.sqrt() * r / (1.0 - r))
    }

    pub(crate) fn check_tail(&self, tail: f64, y: f64) -> Result<(), AutomorphicError> {
        if tail > self.tail_tolerance {
            Err(AutomorphicError::TailTooLarge { y, tail, tol: self.tail_tolerance })
        } else {
            Ok(())
        }
    }
}

fn check_finite(n: i64, v: f64) -> Result<(), AutomorphicError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(AutomorphicError::InvalidSeries {
            invariant: "coefficients are finite",
            detail: format!("index {n} has value {v}"),
        })
    }
}

/// Absolute size below which a half-integral term is bounded rather than evaluated.
const SKIP: f64 = 1e-20;

pub(crate) fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x.rem_euclid(1.0))
}

/// Terms `c(n)|n|^{-1/2} W(n s)` of an expansion at a fixed height, ready to
/// be combined with phases `e(n ξ)`.
#[derive(Clone, Debug)]
pub(crate) struct Row {
    pub terms: Vec<(i64, f64)>,
    pub tail: f64,
    pub scale: f64,
}

impl Row {
    /// Half-integral row over the indices passing `filter`.
    pub fn half(
        series: &CoefficientSeries,
        filter: impl Fn(i64) -> bool + Sync,
        scale: f64,
    ) -> Result<Row, AutomorphicError> {
        let t = series.t;
        let table = WhTable::shared(t)?;
        let picked: Vec<(i64, f64)> =
            series.coeffs.iter().filter(|(n, _)| filter(**n)).map(|(n, v)| (*n, *v)).collect();
        // terms whose envelope is below SKIP go into the tail unevaluated
        let evaluated = picked
            .par_iter()
            .map(|&(n, b)| {
                let amp = b / (n.abs() as f64).sqrt();
                let y = n as f64 * scale;
                let bound = amp.abs() * w_h_envelope(t, y)?;
                if bound < SKIP {
                    Ok(Err(bound))
                } else {
                    Ok(Ok((n, amp * table.eval(y)?)))
                }
            })
            .collect::<Result<Vec<_>, AutomorphicError>>()?;
        let mut terms = Vec::with_capacity(evaluated.len());
        let mut skipped = 0.0;
        for r in evaluated {
            match r {
                Ok(term) => terms.push(term),
                Err(bound) => skipped += bound,
            }
        }
        Ok(Row { terms, tail: series.tail_bound(scale)? + skipped, scale })
    }

    /// Maass row over `n ≥ 1`.
    pub fn maass(series: &CoefficientSeries, scale: f64) -> Result<Row, AutomorphicError> {
        let t = series.t;
        let picked: Vec<(i64, f64)> = series.coeffs.iter().map(|(n, v)| (*n, *v)).collect();
        let terms = picked
            .par_iter()
            .map(|&(n, l)| {
                Ok((n, l / (n as f64).sqrt() * maass_whittaker(t, n as f64 * scale)?))
            })
            .collect::<Result<Vec<_>, AutomorphicError>>()?;
        Ok(Row { terms, tail: series.tail_bound(scale)?, scale })
    }

    /// `Σ a(n) e(n ξ)`.
    pub fn at(&self, xi: f64) -> Complex64 {
        self.terms.iter().map(|&(n, a)| a * e(n as f64 * xi)).sum()
    }

    /// `Σ |a(n)|`.
    pub fn abs_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.1.abs()).sum()
    }
}
