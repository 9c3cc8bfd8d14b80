//! The matrix lattices `R(C/B)`, `S(C/B) = ℤ + 2R(C/B)` and the traceless
//! `S⁰(C/B)`, their Gram data under `B(α,β) = det(α+β) - det α - det β`, and
//! enumeration of elements of bounded majorant norm.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{rat, Mat2, UpperHalfPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),
    #[error("{0} is not in S")]
    NotInS(String),
    #[error("conjugated Gram matrix is not positive definite (pivot {0})")]
    NotPositiveDefinite(f64),
    #[error("coordinates overflow i64")]
    Overflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    R,
    S,
    S0,
}

/// `R(C/B)`, `S(C/B)` or `S⁰(C/B)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    pub family: Family,
    pub c: u64,
    pub b: u64,
}

impl LatticeSpec {
    pub fn r(c: u64, b: u64) -> Self {
        LatticeSpec { family: Family::R, c, b }
    }

    pub fn s(c: u64, b: u64) -> Self {
        LatticeSpec { family: Family::S, c, b }
    }

    pub fn s0(c: u64, b: u64) -> Self {
        LatticeSpec { family: Family::S0, c, b }
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.c == 0 || self.b == 0 {
            return Err(LatticeError::InvalidSpec("levels must be positive".into()));
        }
        if self.c.gcd(&self.b) != 1 {
            return Err(LatticeError::InvalidSpec(format!("gcd({}, {}) ≠ 1", self.c, self.b)));
        }
        if self.family != Family::R && (self.c % 2 == 0 || self.b % 2 == 0) {
            return Err(LatticeError::InvalidSpec("S and S⁰ need odd levels".into()));
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        match self.family {
            Family::S0 => 3,
            _ => 4,
        }
    }

    /// Membership by the divisibility conditions defining the lattice.
    pub fn contains(&self, m: &Mat2) -> bool {
        let b = BigRational::from_integer(self.b.into());
        let c = BigRational::from_integer(self.c.into());
        let two = rat(2, 1);
        let int = |x: &BigRational| x.is_integer();
        match self.family {
            Family::R => int(&m.a) && int(&m.d) && int(&(&m.b * &b)) && int(&(&m.c / &c)),
            Family::S => {
                int(&m.a)
                    && int(&m.d)
                    && m.a.to_integer().is_even() == m.d.to_integer().is_even()
                    && int(&(&m.b * &b / &two))
                    && int(&(&m.c / &c / &two))
            }
            Family::S0 => {
                (&m.a + &m.d).is_zero()
                    && int(&m.a)
                    && int(&(&m.b * &b / &two))
                    && int(&(&m.c / &c / &two))
            }
        }
    }
}

/// `B(α, β) = det(α+β) - det α - det β`.
pub fn bilinear(x: &Mat2, y: &Mat2) -> BigRational {
    &x.a * &y.d + &y.a * &x.d - &x.b * &y.c - &y.b * &x.c
}

/// A basis together with its Gram matrix under [`bilinear`].
#[derive(Clone, Debug, PartialEq)]
pub struct GramData {
    pub basis: Vec<Mat2>,
    pub gram: Vec<Vec<BigRational>>,
}

fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            for k in col..n {
                let t = &f * &a[col][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

fn flatten(m: &Mat2) -> [BigRational; 4] {
    [m.a.clone(), m.b.clone(), m.c.clone(), m.d.clone()]
}

impl GramData {
    pub fn from_basis(basis: Vec<Mat2>) -> Self {
        let gram = basis
            .iter()
            .map(|x| basis.iter().map(|y| bilinear(x, y)).collect())
            .collect();
        GramData { basis, gram }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Determinant of the Gram matrix as computed.
    pub fn gram_determinant(&self) -> BigRational {
        det_rational(&self.gram)
    }

    /// Absolute Gram determinant after rescaling the form to be primitive
    /// integral on the lattice.
    pub fn discriminant(&self) -> BigRational {
        let den = self
            .gram
            .iter()
            .flatten()
            .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let num_gcd = self
            .gram
            .iter()
            .flatten()
            .fold(BigInt::zero(), |g, x| g.gcd(&(x.numer() * &den / x.denom())));
        let scale = BigRational::new(den, num_gcd);
        let n = self.rank() as i32;
        (self.gram_determinant() * num_traits::pow(scale, n as usize)).abs()
    }

    /// Integer coordinates of `m` in the basis, if `m` lies in the span.
    pub fn coords(&self, m: &Mat2) -> Option<Vec<BigInt>> {
        let r = self.rank();
        // least squares is unnecessary: the basis is independent, so solve
        // the 4 x r system by elimination on the augmented matrix
        let mut rows: Vec<Vec<BigRational>> = (0..4)
            .map(|k| {
                let mut row: Vec<BigRational> =
                    self.basis.iter().map(|e| flatten(e)[k].clone()).collect();
                row.push(flatten(m)[k].clone());
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..r {
            let Some(piv) = (row..4).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(piv, row);
            let inv = rows[row][col].recip();
            for k in col..=r {
                rows[row][k] *= &inv;
            }
            for i in 0..4 {
                if i != row && !rows[i][col].is_zero() {
                    let f = rows[i][col].clone();
                    for k in col..=r {
                        let t = &f * &rows[row][k];
                        rows[i][k] -= t;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if (row..4).any(|i| !rows[i][r].is_zero()) || pivots.len() != r {
            return None;
        }
        let sol: Vec<BigRational> = (0..r).map(|i| rows[i][r].clone()).collect();
        sol.iter()
            .all(|x| x.is_integer())
            .then(|| sol.iter().map(|x| x.to_integer()).collect())
    }

    pub fn combine(&self, coords: &[i64]) -> Mat2 {
        coords
            .iter()
            .zip(&self.basis)
            .fold(Mat2::zero(), |acc, (&m, e)| acc.add(&e.scale(&rat(m, 1))))
    }
}

fn e11() -> Mat2 {
    Mat2::from_ints(1, 0, 0, 0)
}
fn e22() -> Mat2 {
    Mat2::from_ints(0, 0, 0, 1)
}

/// Explicit basis: `R(C/B) ↦ {E11, B⁻¹E12, C·E21, E22}`,
/// `S(C/B) ↦ {I, 2B⁻¹E12, 2C·E21, diag(1,-1)}`,
/// `S⁰(C/B) ↦ {diag(1,-1), 2B⁻¹E12, 2C·E21}`.
pub fn basis(spec: &LatticeSpec) -> Result<GramData, LatticeError> {
    spec.validate()?;
    let (b, c) = (spec.b as i64, spec.c as i64);
    let basis = match spec.family {
        Family::R => vec![
            e11(),
            Mat2::new(rat(0, 1), rat(1, b), rat(0, 1), rat(0, 1)),
            Mat2::from_ints(0, 0, c, 0),
            e22(),
        ],
        Family::S => vec![
            Mat2::identity(),
            Mat2::new(rat(0, 1), rat(2, b), rat(0, 1), rat(0, 1)),
            Mat2::from_ints(0, 0, 2 * c, 0),
            Mat2::from_ints(1, 0, 0, -1),
        ],
        Family::S0 => vec![
            Mat2::from_ints(1, 0, 0, -1),
            Mat2::new(rat(0, 1), rat(2, b), rat(0, 1), rat(0, 1)),
            Mat2::from_ints(0, 0, 2 * c, 0),
        ],
    };
    Ok(GramData::from_basis(basis))
}

/// The dual `R(B/C)` of `R(C/B)` with its pairing certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate {
    pub dual: LatticeSpec,
    /// `B(e_i, f_j)` for the two bases.
    pub pairing: Vec<Vec<BigRational>>,
    pub pairing_det: BigRational,
}

impl DualCertificate {
    pub fn is_unimodular(&self) -> bool {
        self.pairing.iter().flatten().all(|x| x.is_integer()) && self.pairing_det.abs().is_one()
    }
}

pub fn dual(spec: &LatticeSpec) -> Result<DualCertificate, LatticeError> {
    if spec.family != Family::R {
        return Err(LatticeError::InvalidSpec("duality is certified for R(C/B) only".into()));
    }
    let dual = LatticeSpec::r(spec.b, spec.c);
    let e = basis(spec)?;
    let f = basis(&dual)?;
    let pairing: Vec<Vec<BigRational>> = e
        .basis
        .iter()
        .map(|x| f.basis.iter().map(|y| bilinear(x, y)).collect())
        .collect();
    let pairing_det = det_rational(&pairing);
    Ok(DualCertificate { dual, pairing, pairing_det })
}

/// `α = m·I + β` with `m = tr(α)/2 ∈ ℤ` and `β ∈ S⁰`, for `α ∈ S = S(1/1)`.
pub fn split_scalar_traceless(alpha: &Mat2) -> Result<(BigInt, Mat2), LatticeError> {
    if !LatticeSpec::s(1, 1).contains(alpha) {
        return Err(LatticeError::NotInS(alpha.to_string()));
    }
    let m = (alpha.trace() / rat(2, 1)).to_integer();
    let beta = alpha.sub(&Mat2::scalar(BigRational::from_integer(m.clone())));
    debug_assert!(LatticeSpec::s0(1, 1).contains(&beta));
    Ok((m, beta))
}

/// The form `Σ_i q_ii (m_i + Σ_{j>i} q_ij m_j)²` of a positive definite Gram
/// matrix, as used by Fincke–Pohst enumeration.
#[derive(Clone, Debug)]
pub struct FinckePohst {
    q: Vec<Vec<f64>>,
}

impl FinckePohst {
    pub fn new(m: &[Vec<f64>]) -> Result<Self, LatticeError> {
        let r = m.len();
        let mut q = m.to_vec();
        for i in 0..r {
            if !(q[i][i] > 0.0) {
                return Err(LatticeError::NotPositiveDefinite(q[i][i]));
            }
            for j in i + 1..r {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for k in i + 1..r {
                for l in k..r {
                    q[k][l] -= q[k][i] * q[i][l];
                }
            }
        }
        Ok(FinckePohst { q })
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    /// Diagonal `q_ii`, the squared Cholesky pivots.
    pub fn diag(&self) -> Vec<f64> {
        (0..self.rank()).map(|i| self.q[i][i]).collect()
    }

    /// All integer vectors `m` with `mᵀ M m ≤ bound`, parallel over the last
    /// coordinate.
    pub fn enumerate(&self, bound: f64) -> Vec<Vec<i64>> {
        let r = self.rank();
        if r == 0 {
            return vec![vec![]];
        }
        let top = r - 1;
        let half = (bound / self.q[top][top]).sqrt();
        let lo = (-half).ceil() as i64;
        let hi = half.floor() as i64;
        (lo..=hi)
            .into_par_iter()
            .flat_map_iter(|mt| {
                let mut out = Vec::new();
                let mut m = vec![0i64; r];
                m[top] = mt;
                let rest = bound - self.q[top][top] * (mt as f64) * (mt as f64);
                if rest >= 0.0 {
                    self.recurse(top, rest, &mut m, &mut out);
                }
                out.into_iter()
            })
            .collect()
    }

    fn recurse(&self, level: usize, budget: f64, m: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if level == 0 {
            out.push(m.clone());
            return;
        }
        let i = level - 1;
        let r = self.rank();
        let center: f64 = -(i + 1..r).map(|j| self.q[i][j] * m[j] as f64).sum::<f64>();
        let half = (budget.max(0.0) / self.q[i][i]).sqrt();
        let lo = (center - half).ceil() as i64;
        let hi = (center + half).floor() as i64;
        for v in lo..=hi {
            let t = v as f64 - center;
            let left = budget - self.q[i][i] * t * t;
            if left < 0.0 {
                continue;
            }
            m[i] = v;
            self.recurse(i, left, m, out);
        }
        m[i] = 0;
    }
}

/// A lattice basis prepared for enumeration and theta sums: float images of
/// the basis matrices and the exact determinant form `det(Σ m_i e_i)`.
#[derive(Clone, Debug)]
pub struct PreparedBasis {
    pub gram: GramData,
    mats: Vec<[f64; 4]>,
    /// `det(Σ m_i e_i) = (Σ_ij m_i m_j det_num[i][j]) / det_den`.
    det_num: Vec<Vec<i128>>,
    pub det_den: i128,
}

/// An enumerated lattice element.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePoint {
    pub coords: Vec<i64>,
    /// `P(σ₁⁻¹ α σ₂)`, computed directly from the conjugated matrix.
    pub norm: f64,
    /// Numerator of `det α` over [`PreparedBasis::det_den`].
    pub det_num: i128,
}

fn mul4(x: &[f64; 4], y: &[f64; 4]) -> [f64; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

impl PreparedBasis {
    pub fn new(gram: GramData) -> Result<Self, LatticeError> {
        let mats = gram.basis.iter().map(Mat2::to_f64).collect();
        // det(Σ m_i e_i) = ½ mᵀ G m
        let den = gram
            .gram
            .iter()
            .flatten()
            .fold(BigInt::from(2), |l, x| l.lcm(&(x.denom() * 2)));
        let det_num = gram
            .gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| { let v: BigInt = x.numer() * &den / x.denom() / 2; v.to_i128() }.ok_or(LatticeError::Overflow))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let det_den = den.to_i128().ok_or(LatticeError::Overflow)?;
        Ok(PreparedBasis { gram, mats, det_num, det_den })
    }

    pub fn from_spec(spec: &LatticeSpec) -> Result<Self, LatticeError> {
        PreparedBasis::new(basis(spec)?)
    }

    pub fn rank(&self) -> usize {
        self.mats.len()
    }

    fn conjugated(&self, w1: &UpperHalfPoint, w2: &UpperHalfPoint) -> Vec<[f64; 4]> {
        let l = w1.sigma_inv();
        let r = w2.sigma();
        self.mats.iter().map(|e| mul4(&mul4(&l, e), &r)).collect()
    }

    /// Gram matrix of `m ↦ P(σ_{w1}⁻¹ (Σ m_i e_i) σ_{w2})`.
    pub fn majorant(&self, w1: &UpperHalfPoint, w2: &UpperHalfPoint) -> Vec<Vec<f64>> {
        let c = self.conjugated(w1, w2);
        c.iter()
            .map(|x| c.iter().map(|y| 0.5 * (0..4).map(|k| x[k] * y[k]).sum::<f64>()).collect())
            .collect()
    }

    pub fn det_numerator(&self, coords: &[i64]) -> i128 {
        let mut s = 0i128;
        for (i, &mi) in coords.iter().enumerate() {
            for (j, &mj) in coords.iter().enumerate() {
                s += mi as i128 * mj as i128 * self.det_num[i][j];
            }
        }
        s
    }

    /// Every lattice element with `P(σ_{w1}⁻¹ α σ_{w2}) ≤ bound`, sorted by
    /// norm and then lexicographically by coordinates.
    pub fn enumerate(
        &self,
        w1: &UpperHalfPoint,
        w2: &UpperHalfPoint,
        bound: f64,
    ) -> Result<(Vec<LatticePoint>, FinckePohst), LatticeError> {
        let conj = self.conjugated(w1, w2);
        let fp = FinckePohst::new(&self.majorant(w1, w2))?;
        let padded = bound * (1.0 + 1e-9) + 1e-12;
        let mut pts: Vec<LatticePoint> = fp
            .enumerate(padded)
            .into_par_iter()
            .filter_map(|coords| {
                let mut m = [0.0f64; 4];
                for (c, e) in coords.iter().zip(&conj) {
                    for k in 0..4 {
                        m[k] += *c as f64 * e[k];
                    }
                }
                let norm = 0.5 * m.iter().map(|x| x * x).sum::<f64>();
                (norm <= bound).then(|| LatticePoint {
                    det_num: self.det_numerator(&coords),
                    coords,
                    norm,
                })
            })
            .collect();
        pts.sort_by(|a, b| a.norm.total_cmp(&b.norm).then_with(|| a.coords.cmp(&b.coords)));
        Ok((pts, fp))
    }
}

/// Lattice elements with `P(σ_{w1}⁻¹ α σ_{w2}) ≤ bound`, including 0.
pub fn enumerate_bounded(
    spec: &LatticeSpec,
    w1: &UpperHalfPoint,
    w2: &UpperHalfPoint,
    bound: f64,
) -> Result<Vec<Mat2>, LatticeError> {
    if !(bound > 0.0) {
        return Err(LatticeError::InvalidSpec(format!("bound {bound} must be positive")));
    }
    let prepared = PreparedBasis::from_spec(spec)?;
    let (pts, _) = prepared.enumerate(w1, w2, bound)?;
    Ok(pts.iter().map(|p| prepared.gram.combine(&p.coords)).collect())
}

/// `P(σ_{w1}⁻¹ α σ_{w2}) = ‖·‖²_F / 2` computed directly.
pub fn majorant_norm(alpha: &Mat2, w1: &UpperHalfPoint, w2: &UpperHalfPoint) -> f64 {
    let m = mul4(&mul4(&w1.sigma_inv(), &alpha.to_f64()), &w2.sigma());
    0.5 * m.iter().map(|x| x * x).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> UpperHalfPoint {
        UpperHalfPoint::i()
    }

    #[test]
    fn s0_membership() {
        let s0 = LatticeSpec::s0(1, 1);
        assert!(s0.contains(&Mat2::from_ints(1, 0, 0, -1)));
        assert!(s0.contains(&Mat2::from_ints(0, 2, 0, 0)));
        assert!(s0.contains(&Mat2::from_ints(0, 0, 2, 0)));
        assert!(!s0.contains(&Mat2::from_ints(0, 1, 0, 0)));
        let s13 = LatticeSpec::s(1, 3);
        assert!(s13.contains(&Mat2::new(rat(1, 1), rat(2, 3), rat(0, 1), rat(1, 1))));
        assert!(!s13.contains(&Mat2::new(rat(1, 1), rat(1, 3), rat(0, 1), rat(1, 1))));
    }

    #[test]
    fn discriminants() {
        assert_eq!(basis(&LatticeSpec::r(5, 1)).unwrap().discriminant(), rat(25, 1));
        assert_eq!(basis(&LatticeSpec::r(1, 1)).unwrap().gram_determinant(), rat(1, 1));
        let r = basis(&LatticeSpec::r(3, 5)).unwrap();
        assert_eq!(r.gram_determinant(), rat(9, 25));
        assert_eq!(r.discriminant(), rat(225, 1));
    }

    #[test]
    fn duality_certificates() {
        for (c, b) in [(1, 1), (5, 1), (1, 5), (3, 7), (4, 9)] {
            let spec = LatticeSpec::r(c, b);
            let cert = dual(&spec).unwrap();
            assert_eq!(cert.dual, LatticeSpec::r(b, c));
            assert!(cert.is_unimodular(), "R({c}/{b})");
            assert_eq!(dual(&cert.dual).unwrap().dual, spec);
        }
        assert!(dual(&LatticeSpec::s(1, 1)).is_err());
    }

    #[test]
    fn split_examples() {
        assert_eq!(
            split_scalar_traceless(&Mat2::identity()).unwrap(),
            (BigInt::from(1), Mat2::zero())
        );
        assert_eq!(
            split_scalar_traceless(&Mat2::from_ints(3, 2, 4, 1)).unwrap(),
            (BigInt::from(2), Mat2::from_ints(1, 2, 4, -1))
        );
        assert!(split_scalar_traceless(&Mat2::from_ints(1, 0, 0, 0)).is_err());
    }

    #[test]
    fn small_enumeration() {
        let pts = enumerate_bounded(&LatticeSpec::s0(1, 1), &i(), &i(), 1.5).unwrap();
        assert_eq!(
            pts,
            vec![Mat2::zero(), Mat2::from_ints(-1, 0, 0, 1), Mat2::from_ints(1, 0, 0, -1)]
        );
    }

    #[test]
    fn coords_round_trip() {
        let g = basis(&LatticeSpec::r(3, 5)).unwrap();
        let m = g.combine(&[2, -7, 1, 4]);
        assert_eq!(
            g.coords(&m).unwrap(),
            vec![2, -7, 1, 4].into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        assert!(g.coords(&Mat2::new(rat(0, 1), rat(1, 7), rat(0, 1), rat(0, 1))).is_none());
    }

    #[test]
    fn det_form_matches_exact_det() {
        let p = PreparedBasis::from_spec(&LatticeSpec::s(1, 5)).unwrap();
        let coords = [3, -2, 5, 1];
        let exact = p.gram.combine(&coords).det();
        assert_eq!(exact, BigRational::new(p.det_numerator(&coords).into(), p.det_den.into()));
    }
}
