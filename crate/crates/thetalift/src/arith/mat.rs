use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::point::UpperHalfPoint;
use super::ArithError;

/// Shorthand for an exact rational `n/d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact 2×2 rational matrix `(a, b; c, d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl Mat2 {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
            BigRational::from_integer(c.into()),
            BigRational::from_integer(d.into()),
        )
    }

    pub fn from_bigints(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Mat2::new(
            BigRational::from_integer(a),
            BigRational::from_integer(b),
            BigRational::from_integer(c),
            BigRational::from_integer(d),
        )
    }

    pub fn identity() -> Self {
        Mat2::from_ints(1, 0, 0, 1)
    }

    pub fn zero() -> Self {
        Mat2::from_ints(0, 0, 0, 0)
    }

    pub fn scalar(s: BigRational) -> Self {
        Mat2::new(s.clone(), BigRational::zero(), BigRational::zero(), s)
    }

    pub fn diag(x: BigRational, y: BigRational) -> Self {
        Mat2::new(x, BigRational::zero(), BigRational::zero(), y)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        Mat2::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        Mat2::new(&self.a - &o.a, &self.b - &o.b, &self.c - &o.c, &self.d - &o.d)
    }

    pub fn scale(&self, s: &BigRational) -> Mat2 {
        Mat2::new(&self.a * s, &self.b * s, &self.c * s, &self.d * s)
    }

    pub fn neg(&self) -> Mat2 {
        Mat2::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn det(&self) -> BigRational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.d
    }

    pub fn inverse(&self) -> Result<Mat2, ArithError> {
        let det = self.det();
        if det.is_zero() {
            return Err(ArithError::Singular);
        }
        Ok(Mat2::new(
            &self.d / &det,
            -&self.b / &det,
            -&self.c / &det,
            &self.a / &det,
        ))
    }

    /// `self * m * self⁻¹`.
    pub fn conjugate(&self, m: &Mat2) -> Result<Mat2, ArithError> {
        Ok(self.mul(m).mul(&self.inverse()?))
    }

    pub fn entries(&self) -> [&BigRational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_integral(&self) -> bool {
        self.entries().iter().all(|e| e.is_integer())
    }

    /// Integer entries, if all entries are integral.
    pub fn int_entries(&self) -> Option<[BigInt; 4]> {
        if !self.is_integral() {
            return None;
        }
        Some([
            self.a.to_integer(),
            self.b.to_integer(),
            self.c.to_integer(),
            self.d.to_integer(),
        ])
    }

    /// Integer entries as `i64`, if integral and in range.
    pub fn i64_entries(&self) -> Option<[i64; 4]> {
        let e = self.int_entries()?;
        Some([e[0].to_i64()?, e[1].to_i64()?, e[2].to_i64()?, e[3].to_i64()?])
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_integral() && self.det().is_one()
    }

    pub fn to_f64(&self) -> [f64; 4] {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        [f(&self.a), f(&self.b), f(&self.c), f(&self.d)]
    }

    /// Möbius action on the upper half plane; requires `det > 0`.
    pub fn act(&self, z: &UpperHalfPoint) -> UpperHalfPoint {
        debug_assert!(self.det().is_positive());
        let [a, b, c, d] = self.to_f64();
        let det = self.det().to_f64().unwrap_or(f64::NAN);
        let re = c.mul_add(z.x, d);
        let im = c * z.y;
        let denom = re * re + im * im;
        let num_re = a.mul_add(z.x, b);
        let num_im = a * z.y;
        let x = (num_re * re + num_im * im) / denom;
        let y = det * z.y / denom;
        UpperHalfPoint { x, y }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = Mat2::new(rat(3, 2), rat(1, 5), rat(-7, 3), rat(2, 1));
        let p = m.mul(&m.inverse().unwrap());
        assert_eq!(p, Mat2::identity());
    }

    #[test]
    fn singular_rejected() {
        assert_eq!(Mat2::from_ints(1, 2, 2, 4).inverse(), Err(ArithError::Singular));
    }

    #[test]
    fn action_of_s_on_i() {
        let s = Mat2::from_ints(0, -1, 1, 0);
        let z = s.act(&UpperHalfPoint::new(0.0, 1.0).unwrap());
        assert!(z.x.abs() < 1e-15 && (z.y - 1.0).abs() < 1e-15);
    }
}
