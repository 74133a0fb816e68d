//! Complex numbers over arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// A complex scalar with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn zero() -> Self {
        CRat {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        CRat {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        CRat {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        CRat {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRat { re, im }
    }

    pub fn i() -> Self {
        CRat {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        let norm = &self.re * &self.re + &self.im * &self.im;
        assert!(!norm.is_zero(), "division by zero");
        CRat {
            re: &self.re / &norm,
            im: -&self.im / &norm,
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        let f = BigRational::from_integer(BigInt::from(n));
        CRat {
            re: &self.re * &f,
            im: &self.im * &f,
        }
    }

    pub fn div_int(&self, n: i64) -> Self {
        assert!(n != 0);
        let f = BigRational::from_integer(BigInt::from(n));
        CRat {
            re: &self.re / &f,
            im: &self.im / &f,
        }
    }
}

impl fmt::Debug for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_positive() {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}{}i", self.re, self.im)
        }
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for &CRat {
    type Output = CRat;
    fn add(self, rhs: &CRat) -> CRat {
        CRat {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &CRat {
    type Output = CRat;
    fn sub(self, rhs: &CRat) -> CRat {
        CRat {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &CRat {
    type Output = CRat;
    fn mul(self, rhs: &CRat) -> CRat {
        CRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Add for CRat {
    type Output = CRat;
    fn add(self, rhs: CRat) -> CRat {
        &self + &rhs
    }
}

impl Sub for CRat {
    type Output = CRat;
    fn sub(self, rhs: CRat) -> CRat {
        &self - &rhs
    }
}

impl Mul for CRat {
    type Output = CRat;
    fn mul(self, rhs: CRat) -> CRat {
        &self * &rhs
    }
}

impl Neg for CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        -&self
    }
}

impl AddAssign<&CRat> for CRat {
    fn add_assign(&mut self, rhs: &CRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&CRat> for CRat {
    fn sub_assign(&mut self, rhs: &CRat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = CRat::from_ratio(2, 3);
        let b = CRat::new(
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            BigRational::new(BigInt::from(-3), BigInt::from(4)),
        );
        let prod = &a * &b;
        assert_eq!(prod.re, BigRational::new(1.into(), 3.into()));
        assert_eq!(prod.im, BigRational::new((-1).into(), 2.into()));
        let inv = b.inv();
        assert_eq!(&b * &inv, CRat::one());
    }

    #[test]
    fn conjugation() {
        let i = CRat::i();
        assert_eq!(i.conj(), -&i);
        assert_eq!(&i * &i, CRat::from_int(-1));
    }
}
