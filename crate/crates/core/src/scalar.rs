//! Exact scalars: arbitrary-precision rationals or elements of a prime field.
//!
//! Rationals are the reference semantics. Prime-field scalars exist for cheap fuzzing.
//! Integer-valued rationals act as constants in either field, so generic code can mix
//! `Scalar::from(2)` with prime-field values; combining two different primes panics.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The ground field of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Field {
    #[default]
    Rational,
    Prime(u64),
}

impl Field {
    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Modular { value: reduce_i128(n as i128, p), prime: p },
        }
    }

    /// Parses `"n"` or `"p/q"` into this field.
    pub fn parse(self, text: &str) -> Result<Scalar> {
        let q: Scalar = text.parse()?;
        match self {
            Field::Rational => Ok(q),
            Field::Prime(p) => q.to_prime(p).ok_or_else(|| Error::ScalarParse(text.to_string())),
        }
    }
}

/// An exact field element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    /// Always in lowest terms with positive denominator (maintained by `num-rational`).
    Rational(BigRational),
    Modular { value: u64, prime: u64 },
}

fn reduce_i128(n: i128, p: u64) -> u64 {
    n.rem_euclid(p as i128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = base as u128 % p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

impl Scalar {
    pub fn zero() -> Self {
        Field::Rational.zero()
    }

    pub fn one() -> Self {
        Field::Rational.one()
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `(-1)^k` as a rational constant.
    pub fn sign(negative: bool) -> Self {
        if negative {
            Scalar::from(-1)
        } else {
            Scalar::one()
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Modular { prime, .. } => Field::Prime(*prime),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    /// The same scalar with the field of `other`; used to embed constants.
    pub fn in_field_of(&self, other: &Scalar) -> Scalar {
        match other {
            Scalar::Rational(_) => self.clone(),
            Scalar::Modular { prime, .. } => self
                .to_prime(*prime)
                .unwrap_or_else(|| panic!("{} is not defined modulo {}", self, prime)),
        }
    }

    /// Reduces a rational modulo `p`; `None` if the denominator vanishes mod `p`.
    pub fn to_prime(&self, p: u64) -> Option<Scalar> {
        match self {
            Scalar::Rational(q) => {
                let pb = BigInt::from(p);
                let num = q.numer().mod_floor(&pb).to_u64()?;
                let den = q.denom().mod_floor(&pb).to_u64()?;
                if den == 0 {
                    return None;
                }
                let inv = pow_mod(den, p - 2, p);
                Some(Scalar::Modular { value: ((num as u128 * inv as u128) % p as u128) as u64, prime: p })
            }
            Scalar::Modular { prime, .. } if *prime == p => Some(self.clone()),
            Scalar::Modular { .. } => None,
        }
    }

    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Modular { value, prime } => Scalar::Modular { value: pow_mod(*value, prime - 2, *prime), prime: *prime },
        })
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Modular { .. } => None,
        }
    }

    fn combine(&self, rhs: &Scalar, f_q: impl Fn(&BigRational, &BigRational) -> BigRational, f_p: impl Fn(u128, u128, u128) -> u128) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(f_q(a, b)),
            (Scalar::Modular { value: a, prime: p }, Scalar::Modular { value: b, prime: q }) => {
                assert_eq!(p, q, "mixing scalars from different prime fields");
                Scalar::Modular { value: f_p(*a as u128, *b as u128, *p as u128) as u64, prime: *p }
            }
            (Scalar::Modular { .. }, Scalar::Rational(_)) => self.combine(&rhs.in_field_of(self), f_q, f_p),
            (Scalar::Rational(_), Scalar::Modular { .. }) => self.in_field_of(rhs).combine(rhs, f_q, f_p),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Field::Rational.from_i64(n)
    }
}

impl From<i32> for Scalar {
    fn from(n: i32) -> Self {
        Field::Rational.from_i64(n as i64)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses a decimal integer or `p/q`.
    fn from_str(text: &str) -> Result<Self> {
        let err = || Error::ScalarParse(text.to_string());
        let t = text.trim();
        if t.is_empty() {
            return Err(err());
        }
        let parse_int = |s: &str| -> Result<BigInt> {
            let s = s.trim();
            let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            s.parse::<BigInt>().map_err(|_| err())
        };
        match t.split_once('/') {
            None => Ok(Scalar::Rational(BigRational::from_integer(parse_int(t)?))),
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Scalar::Rational(BigRational::new(parse_int(n)?, d)))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Scalar::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Modular { value, .. } => write!(f, "{}", value),
        }
    }
}

impl Scalar {
    /// Canonical text form; parsing it back yields an identical value.
    pub fn to_text(&self) -> String {
        format!("{}", self)
    }

    pub fn abs_is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.abs().is_one(),
            Scalar::Modular { value, prime } => *value == 1 || *value == prime - 1,
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $fq:expr, $fp:expr) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                self.combine(rhs, $fq, $fp)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a + b, |a, b, p| (a + b) % p);
binop!(Sub, sub, |a, b| a - b, |a, b, p| (a + p - b) % p);
binop!(Mul, mul, |a, b| a * b, |a, b, p| a * b % p);

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        let inv = rhs.in_field_of(self).inverse().expect("division by zero");
        self * &inv
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Modular { value, prime } => Scalar::Modular { value: (prime - value) % prime, prime },
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let q: Scalar = "6/-4".parse().unwrap();
        assert_eq!(q.to_text(), "-3/2");
        assert_eq!(Scalar::from(4).to_text(), "4");
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "x", "1/2/3", "--1", "1.5"] {
            assert!(bad.parse::<Scalar>().is_err(), "{bad}");
        }
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::Prime(7);
        let a = f.from_i64(3);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
        assert_eq!(f.parse("1/2").unwrap(), f.from_i64(4));
        assert!(f.parse("1/7").is_err());
        // integer constants embed into the prime field
        assert_eq!(&a + &Scalar::from(5), f.from_i64(1));
    }

    proptest! {
        #[test]
        fn text_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
            let q = Scalar::from_ratio(n, d);
            let back: Scalar = q.to_text().parse().unwrap();
            prop_assert_eq!(back.clone(), q);
            prop_assert_eq!(back.to_string(), Scalar::from_ratio(n, d).to_string());
        }

        #[test]
        fn nonzero_times_reciprocal_is_one(n in 1i64..1000, d in 1i64..1000, neg in any::<bool>()) {
            let q = Scalar::from_ratio(if neg { -n } else { n }, d);
            prop_assert!((&q * &q.inverse().unwrap()).is_one());
        }
    }
}
