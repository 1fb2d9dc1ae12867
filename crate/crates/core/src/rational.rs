//! Exact rational arithmetic.
//!
//! Every closed-form quantity in this crate (interval lengths, bound values,
//! construction parameters, breakpoint abscissae) is discontinuous in its
//! inputs through floors and ceilings, so all of them are carried as exact
//! fractions. Floating point only appears downstream, in quadrature and
//! eigenvalue estimation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "rational denominator must be nonzero");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "rational denominator must be nonzero");
        Rational(BigRational::new(numer, denom))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn floor_big(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil_big(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Floor as `i64`; panics if the value does not fit, which cannot happen
    /// for the bounded parameters used in this crate.
    pub fn floor_i64(&self) -> i64 {
        self.floor_big().to_i64().expect("floor out of i64 range")
    }

    pub fn ceil_i64(&self) -> i64 {
        self.ceil_big().to_i64().expect("ceiling out of i64 range")
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact conversion of a finite `f64` (binary fractions are rationals).
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }

    /// Parses either a fraction `"a/b"` or a decimal string such as
    /// `"1.25"`, both converted exactly (decimals via powers of ten).
    pub fn parse(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("cannot parse {s:?} as an exact rational"));
        if let Some((n, d)) = s.split_once('/') {
            let numer = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let denom = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if denom.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Rational(BigRational::new(numer, denom)));
        }
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let digits = |t: &str| t.is_empty() || t.bytes().all(|b| b.is_ascii_digit());
        if !digits(int_part) || !digits(frac_part) {
            return Err(bad());
        }
        let mut numer = if int_part.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(int_part).map_err(|_| bad())?
        };
        let mut denom = BigInt::one();
        for c in frac_part.bytes() {
            numer = numer * 10 + (c - b'0');
            denom *= 10;
        }
        Ok(Rational(BigRational::new(numer * sign, denom)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Rational::parse(s)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rational::parse(&s).map_err(de::Error::custom)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigRational::from_integer(BigInt::from(*other))
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0
            .partial_cmp(&BigRational::from_integer(BigInt::from(*other)))
    }
}

/// Shorthand used pervasively in tests and internal constructions.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_fraction_and_decimal() {
        assert_eq!(Rational::parse("3/2").unwrap(), rat(3, 2));
        assert_eq!(Rational::parse("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(Rational::parse("3/-2").unwrap(), rat(-3, 2));
        assert_eq!(Rational::parse("1.25").unwrap(), rat(5, 4));
        assert_eq!(Rational::parse("-0.1").unwrap(), rat(-1, 10));
        assert_eq!(Rational::parse(".5").unwrap(), rat(1, 2));
        assert_eq!(Rational::parse("7").unwrap(), rat(7, 1));
        assert!(Rational::parse("1/0").is_err());
        assert!(Rational::parse("abc").is_err());
        assert!(Rational::parse("1.2.3").is_err());
    }

    #[test]
    fn exact_arithmetic() {
        let a = rat(1, 3);
        let b = rat(1, 6);
        assert_eq!(&a + &b, rat(1, 2));
        assert_eq!(&a - &b, rat(1, 6));
        assert_eq!(&a * &b, rat(1, 18));
        assert_eq!(&a / &b, rat(2, 1));
        assert_eq!(-a, rat(-1, 3));
    }

    #[test]
    fn floor_and_ceiling() {
        assert_eq!(rat(7, 2).floor_i64(), 3);
        assert_eq!(rat(7, 2).ceil_i64(), 4);
        assert_eq!(rat(-7, 2).floor_i64(), -4);
        assert_eq!(rat(-7, 2).ceil_i64(), -3);
        assert_eq!(rat(4, 2).floor_i64(), 2);
        assert_eq!(rat(4, 2).ceil_i64(), 2);
    }

    #[test]
    fn display_reduced() {
        assert_eq!(rat(4, 2).to_string(), "2");
        assert_eq!(rat(6, 4).to_string(), "3/2");
        assert_eq!(rat(-6, 4).to_string(), "-3/2");
    }

    #[test]
    fn json_round_trip() {
        for r in [rat(3, 2), rat(-7, 3), rat(5, 1), Rational::zero()] {
            let s = serde_json::to_string(&r).unwrap();
            let back: Rational = serde_json::from_str(&s).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn exact_f64_conversion() {
        assert_eq!(Rational::from_f64_exact(0.25).unwrap(), rat(1, 4));
        assert_eq!(Rational::from_f64_exact(-3.5).unwrap(), rat(-7, 2));
        assert!(Rational::from_f64_exact(f64::NAN).is_none());
    }
}
