//! Exact rational scalar type used across the crate.
//!
//! Every quantity in a decision path — click-through-rates, values, bids,
//! prices, utilities — is an arbitrary-precision rational. Tie-breaking is
//! semantically load-bearing in position auctions (whether an equilibrium
//! exists can hinge on an exact score tie), so floating point is never used.
//!
//! Supported text encodings, parsed exactly:
//! - integer strings: `"7"`, `"-3"`
//! - fraction strings: `"2/5"`, `"-7/3"`
//! - decimal strings: `"0.4"`, `"1.25"`, `".5"`
//!
//! Values render as `"p/q"` in canonical reduced form, or as a bare integer
//! when the denominator is 1. JSON (de)serialization uses the same strings;
//! JSON integers are accepted on input, JSON floats are rejected (inexact).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use thiserror::Error;

/// Error produced when a string cannot be parsed as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    /// The input was empty or all whitespace.
    #[error("empty string is not a rational number")]
    Empty,
    /// The input did not match any supported encoding.
    #[error("`{0}` is not a rational number (expected forms: `7`, `-3/4`, `0.25`)")]
    Malformed(String),
    /// A fraction string had a zero denominator.
    #[error("`{0}` has a zero denominator")]
    ZeroDenominator(String),
}

/// Exact arbitrary-precision rational number.
///
/// Thin wrapper around a reduced big-integer ratio with the parsing, display,
/// and serialization conventions used throughout this crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(BigRational);

impl Q {
    /// The rational 0.
    pub fn zero() -> Self {
        Q(BigRational::zero())
    }

    /// The rational 1.
    pub fn one() -> Self {
        Q(BigRational::one())
    }

    /// Exact rational from an integer.
    pub fn from_int(n: i64) -> Self {
        Q(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact rational `num/den`.
    ///
    /// # Panics
    /// Panics if `den == 0`; use this only with literal constants.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational denominator must be nonzero");
        Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact rational from big-integer parts.
    ///
    /// # Panics
    /// Panics if `den` is zero.
    pub fn from_bigint_ratio(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "rational denominator must be nonzero");
        Q(BigRational::new(num, den))
    }

    /// Numerator of the canonical reduced form (sign lives here).
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator of the canonical reduced form (always positive).
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// True iff this value is exactly 0.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// True iff this value is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// True iff this value is strictly negative.
    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Absolute value.
    pub fn abs(&self) -> Self {
        Q(self.0.abs())
    }

    /// Multiplicative inverse, or `None` for 0.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Q(self.0.recip()))
        }
    }

    /// The smaller of two values (by value, not by reference identity).
    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// The larger of two values.
    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Q {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num
                .trim()
                .parse()
                .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
            let den: BigInt = den
                .trim()
                .parse()
                .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            return Ok(Q(BigRational::new(num, den)));
        }
        // Decimal or integer form: [sign] digits [. digits]
        let (sign, digits) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ParseRationalError::Malformed(s.to_string()));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(ParseRationalError::Malformed(s.to_string()));
        }
        let mantissa: BigInt = format!("{int_part}{frac_part}")
            .parse()
            .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        Ok(Q(BigRational::new(BigInt::from(sign) * mantissa, denom)))
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

struct QVisitor;

impl de::Visitor<'_> for QVisitor {
    type Value = Q;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an exact rational encoded as a string like \"2/5\" or \"0.4\", or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
        Ok(Q::from_int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
        Ok(Q(BigRational::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q, E> {
        Err(E::custom(format!(
            "refusing to parse float {v} as an exact rational; encode it as a string like \"2/5\" or \"0.4\""
        )))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(QVisitor)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Q {
            type Output = Q;
            fn $method(self, rhs: Q) -> Q {
                Q((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Q {
            type Output = Q;
            fn $method(self, rhs: &Q) -> Q {
                Q((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Q> for Q {
            type Output = Q;
            fn $method(self, rhs: &Q) -> Q {
                Q((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Q> for &Q {
            type Output = Q;
            fn $method(self, rhs: Q) -> Q {
                Q((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Q {
    type Output = Q;
    /// # Panics
    /// Panics on division by zero; callers must guard explicitly.
    fn div(self, rhs: Q) -> Q {
        assert!(!rhs.is_zero(), "exact rational division by zero");
        Q(self.0 / rhs.0)
    }
}

impl Div for &Q {
    type Output = Q;
    fn div(self, rhs: &Q) -> Q {
        assert!(!rhs.is_zero(), "exact rational division by zero");
        Q(&self.0 / &rhs.0)
    }
}

impl Div<&Q> for Q {
    type Output = Q;
    fn div(self, rhs: &Q) -> Q {
        assert!(!rhs.is_zero(), "exact rational division by zero");
        Q(self.0 / &rhs.0)
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-&self.0)
    }
}

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, rhs: &Q) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Q> for Q {
    fn sub_assign(&mut self, rhs: &Q) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Q {
    fn sum<I: Iterator<Item = Q>>(iter: I) -> Q {
        iter.fold(Q::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Q> for Q {
    fn sum<I: Iterator<Item = &'a Q>>(iter: I) -> Q {
        iter.fold(Q::zero(), |acc, x| acc + x)
    }
}

/// Shorthand constructor: `q(2, 5)` is the exact rational 2/5.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(num, den)
}

/// Shorthand constructor: `qi(7)` is the exact rational 7.
pub fn qi(n: i64) -> Q {
    Q::from_int(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_decimal_and_integer_forms() {
        assert_eq!("2/5".parse::<Q>().unwrap(), q(2, 5));
        assert_eq!("0.4".parse::<Q>().unwrap(), q(2, 5));
        assert_eq!(".5".parse::<Q>().unwrap(), q(1, 2));
        assert_eq!("-7/3".parse::<Q>().unwrap(), q(-7, 3));
        assert_eq!("-1.25".parse::<Q>().unwrap(), q(-5, 4));
        assert_eq!("7".parse::<Q>().unwrap(), qi(7));
        assert_eq!("4/10".parse::<Q>().unwrap(), q(2, 5));
    }

    #[test]
    fn rejects_malformed_inputs() {
        assert_eq!("".parse::<Q>(), Err(ParseRationalError::Empty));
        assert!(matches!(
            "1/0".parse::<Q>(),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
        assert!("one".parse::<Q>().is_err());
        assert!("1e3".parse::<Q>().is_err());
        assert!(".".parse::<Q>().is_err());
        assert!("1.2.3".parse::<Q>().is_err());
    }

    #[test]
    fn displays_in_canonical_reduced_form() {
        assert_eq!(q(4, 10).to_string(), "2/5");
        assert_eq!(q(-4, 10).to_string(), "-2/5");
        assert_eq!(q(14, 2).to_string(), "7");
        assert_eq!(Q::zero().to_string(), "0");
    }

    #[test]
    fn arithmetic_is_exact() {
        assert_eq!(q(1, 3) + q(1, 6), q(1, 2));
        assert_eq!(q(1, 10) * qi(10), qi(1));
        assert_eq!(qi(1) - q(2, 5), q(3, 5));
        assert_eq!(q(2, 5) / q(1, 5), qi(2));
        assert_eq!(-q(1, 2), q(-1, 2));
        let total: Q = [q(1, 4), q(1, 4), q(1, 2)].iter().sum();
        assert_eq!(total, qi(1));
    }

    #[test]
    fn serde_round_trips_as_strings() {
        let x = q(2, 5);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"2/5\"");
        let back: Q = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        let from_int: Q = serde_json::from_str("3").unwrap();
        assert_eq!(from_int, qi(3));
        assert!(serde_json::from_str::<Q>("0.4").is_err());
        let from_decimal_string: Q = serde_json::from_str("\"0.4\"").unwrap();
        assert_eq!(from_decimal_string, q(2, 5));
    }

    #[test]
    fn ordering_and_helpers_follow_exact_values() {
        assert!(q(1, 3) < q(2, 5));
        assert_eq!(q(1, 3).max(q(2, 5)), q(2, 5));
        assert_eq!(q(1, 3).min(q(2, 5)), q(1, 3));
        assert_eq!(q(-3, 4).abs(), q(3, 4));
        assert_eq!(q(2, 5).recip(), Some(q(5, 2)));
        assert_eq!(Q::zero().recip(), None);
    }
}
