use std::ops::Mul;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ArithError;

/// The fourth root of unity `i^k`, stored exactly as `k mod 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FourthRoot(u8);

impl FourthRoot {
    pub const ONE: FourthRoot = FourthRoot(0);
    pub const I: FourthRoot = FourthRoot(1);
    pub const MINUS_ONE: FourthRoot = FourthRoot(2);
    pub const MINUS_I: FourthRoot = FourthRoot(3);

    pub fn from_power(k: i64) -> Self {
        FourthRoot(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    /// Sign `±1` as a fourth root.
    pub fn from_sign(s: i8) -> Self {
        if s < 0 {
            FourthRoot::MINUS_ONE
        } else {
            FourthRoot::ONE
        }
    }

    pub fn conj(self) -> Self {
        FourthRoot((4 - self.0) % 4)
    }

    pub fn inv(self) -> Self {
        self.conj()
    }

    pub fn pow(self, n: u32) -> Self {
        FourthRoot(((self.0 as u32 * n) % 4) as u8)
    }

    /// Exact value as a Gaussian integer `(re, im)`.
    pub fn gaussian(self) -> (i64, i64) {
        match self.0 {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        let (re, im) = self.gaussian();
        Complex64::new(re as f64, im as f64)
    }
}

impl Mul for FourthRoot {
    type Output = FourthRoot;
    fn mul(self, o: FourthRoot) -> FourthRoot {
        FourthRoot((self.0 + o.0) % 4)
    }
}

impl std::fmt::Display for FourthRoot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(["1", "i", "-1", "-i"][self.0 as usize])
    }
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
fn jacobi(a: &BigInt, n: &BigInt) -> i8 {
    debug_assert!(n.is_positive() && n.is_odd());
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut sign = 1i8;
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n).mod_floor(&eight);
            if r == BigInt::from(3) || r == BigInt::from(5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == BigInt::from(3) && n.mod_floor(&four) == BigInt::from(3) {
            sign = -sign;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        sign
    } else {
        0
    }
}

/// Shimura's extended quadratic residue symbol `(c/d)` for odd `d`.
///
/// For `d > 0` this is the Jacobi symbol with `(c/1) = 1`. For `d < 0` it is
/// `(c/|d|)` times `-1` when `c < 0`, with `(0/±1) = 1`.
pub fn kronecker(c: &BigInt, d: &BigInt) -> Result<i8, ArithError> {
    if d.is_even() {
        return Err(ArithError::EvenModulus(d.to_string()));
    }
    let base = jacobi(c, &d.abs());
    if d.is_negative() && c.is_negative() {
        Ok(-base)
    } else {
        Ok(base)
    }
}

pub fn kronecker_i64(c: i64, d: i64) -> Result<i8, ArithError> {
    kronecker(&BigInt::from(c), &BigInt::from(d))
}

/// `ε_d`: `1` if `d ≡ 1 (mod 4)` and `i` if `d ≡ 3 (mod 4)`.
pub fn epsilon_d(d: &BigInt) -> Result<FourthRoot, ArithError> {
    if d.is_even() {
        return Err(ArithError::EvenModulus(d.to_string()));
    }
    if d.mod_floor(&BigInt::from(4)).is_one() {
        Ok(FourthRoot::ONE)
    } else {
        Ok(FourthRoot::I)
    }
}
