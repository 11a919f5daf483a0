//! Parameter scalars that are either exact rationals or IEEE doubles.
//!
//! Every classification rule in this crate is a sign condition on a small
//! polynomial in the five coefficients. When all coefficients are exact the
//! sign is decided exactly; otherwise it is decided in `f64` against a
//! tolerance scaled by the magnitude of the polynomial's terms.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Sign of a real quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_f64(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseScalarError {
    #[error("empty scalar literal")]
    Empty,
    #[error("invalid scalar literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("non-finite scalar `{0}`")]
    NonFinite(String),
}

/// A model coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn int(n: i64) -> Scalar {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn float(x: f64) -> Scalar {
        Scalar::Float(x)
    }

    /// Exact binary value of a finite float.
    pub fn from_f64_exact(x: f64) -> Scalar {
        BigRational::from_float(x).map_or(Scalar::Float(x), Scalar::Exact)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// Multiplies by ±1, keeping exactness.
    pub fn signed(&self, sign: i8) -> Scalar {
        match (self, sign) {
            (s, 1) => s.clone(),
            (Scalar::Exact(r), _) => Scalar::Exact(-r.clone()),
            (Scalar::Float(x), _) => Scalar::Float(-x),
        }
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerators/denominators: scale down by a power of two first.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Parses `7`, `-3/4`, `0.125` as exact rationals; anything else that `f64`
/// accepts (exponents, etc.) becomes a float.
impl FromStr for Scalar {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        if let Some((n, d)) = t.split_once('/') {
            let num = parse_decimal(n.trim()).ok_or_else(|| ParseScalarError::Invalid(t.into()))?;
            let den = parse_decimal(d.trim()).ok_or_else(|| ParseScalarError::Invalid(t.into()))?;
            if den.is_zero() {
                return Err(ParseScalarError::ZeroDenominator(t.into()));
            }
            return Ok(Scalar::Exact(num / den));
        }
        if let Some(r) = parse_decimal(t) {
            return Ok(Scalar::Exact(r));
        }
        match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Scalar::Float(x)),
            Ok(_) => Err(ParseScalarError::NonFinite(t.into())),
            Err(_) => Err(ParseScalarError::Invalid(t.into())),
        }
    }
}

/// `[-+]digits[.digits]` as an exact rational.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) if r.is_integer() => match r.numer().to_i64() {
                Some(n) => serializer.serialize_i64(n),
                None => serializer.serialize_str(&self.to_string()),
            },
            Scalar::Exact(_) => serializer.serialize_str(&self.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string such as \"3/4\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar::int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar::Exact(BigRational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
                if v.is_finite() {
                    Ok(Scalar::Float(v))
                } else {
                    Err(E::custom("non-finite scalar"))
                }
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

/// A signed sum of monomials in the coefficient vector `[b0, b1, b2, b3, c0]`.
///
/// Used for every sign test so that exact and floating evaluation share one
/// definition.
#[derive(Debug, Clone, Copy)]
pub struct Poly {
    terms: &'static [(i32, &'static [usize])],
}

impl Poly {
    pub const fn new(terms: &'static [(i32, &'static [usize])]) -> Poly {
        Poly { terms }
    }

    pub fn eval_exact(&self, c: &[BigRational; 5]) -> BigRational {
        let mut acc = BigRational::zero();
        for (k, mono) in self.terms {
            let mut t = BigRational::from_integer(BigInt::from(*k));
            for &i in *mono {
                t *= &c[i];
            }
            acc += t;
        }
        acc
    }

    /// Value and natural scale (sum of term magnitudes).
    pub fn eval_f64(&self, c: &[f64; 5]) -> (f64, f64) {
        let mut acc = 0.0;
        let mut scale = 0.0;
        for (k, mono) in self.terms {
            let t = mono.iter().fold(*k as f64, |p, &i| p * c[i]);
            acc += t;
            scale += t.abs();
        }
        (acc, scale)
    }
}

/// Decides a sign: exactly when exact coefficients are supplied, otherwise
/// treating `|value| <= eps * max(1, scale)` as zero.
pub fn decide_sign(poly: Poly, exact: Option<&[BigRational; 5]>, approx: &[f64; 5], eps: f64) -> Sign {
    if let Some(c) = exact {
        let v = poly.eval_exact(c);
        return if v.is_positive() {
            Sign::Positive
        } else if v.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        };
    }
    let (v, scale) = poly.eval_f64(approx);
    if v.abs() <= eps * scale.max(1.0) {
        Sign::Zero
    } else {
        Sign::of_f64(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn parses_integers_fractions_and_decimals_exactly() {
        assert_eq!("3".parse::<Scalar>().unwrap(), Scalar::int(3));
        assert_eq!("-3/4".parse::<Scalar>().unwrap(), Scalar::ratio(-3, 4));
        assert_eq!("0.125".parse::<Scalar>().unwrap(), Scalar::ratio(1, 8));
        assert_eq!("1.5/3".parse::<Scalar>().unwrap(), Scalar::ratio(1, 2));
        assert_eq!(".5".parse::<Scalar>().unwrap(), Scalar::ratio(1, 2));
    }

    #[test]
    fn exponent_literals_fall_back_to_float() {
        assert_eq!("1e-3".parse::<Scalar>().unwrap(), Scalar::Float(1e-3));
    }

    #[test]
    fn rejects_garbage() {
        assert!("".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert!(matches!("1/0".parse::<Scalar>(), Err(ParseScalarError::ZeroDenominator(_))));
        assert!("inf".parse::<Scalar>().is_err());
    }

    #[test]
    fn json_accepts_numbers_and_fraction_strings() {
        let v: Vec<Scalar> = serde_json::from_str(r#"[2, 0.5, "1/3", "-7"]"#).unwrap();
        assert_eq!(v[0], Scalar::int(2));
        assert_eq!(v[1], Scalar::Float(0.5));
        assert_eq!(v[2], Scalar::ratio(1, 3));
        assert_eq!(v[3], Scalar::int(-7));
        assert_eq!(serde_json::to_string(&Scalar::ratio(1, 3)).unwrap(), "\"1/3\"");
        assert_eq!(serde_json::to_string(&Scalar::int(4)).unwrap(), "4");
    }

    #[test]
    fn float_sign_uses_scaled_tolerance() {
        // b2*b3 - b1*c0
        const P: Poly = Poly::new(&[(1, &[2, 3]), (-1, &[1, 4])]);
        let c = [2.0, 1.0, 1e6, 1e6, 1e12 + 1e-3];
        assert_eq!(decide_sign(P, None, &c, 1e-12), Sign::Zero);
        assert_eq!(decide_sign(P, None, &[2.0, 1.0, 1.0, 1.0, 0.5], 1e-12), Sign::Positive);
    }

    #[test]
    fn exact_sign_has_no_tolerance() {
        const P: Poly = Poly::new(&[(1, &[2, 3]), (-1, &[1, 4])]);
        let tiny = BigRational::new(BigInt::from(1), num_traits::pow(BigInt::from(10), 40));
        let one = BigRational::one;
        let c = [one(), one(), one(), one(), one() - tiny];
        assert_eq!(decide_sign(P, Some(&c), &[1.0; 5], 1e-12), Sign::Positive);
    }
}
