//! Exact rational numbers and the literal syntax shared by scenarios and traces.
//!
//! Literals may be written as integers (`-12`), decimals (`0.25`), scientific
//! notation (`1.5e-15`) or fractions (`4/3`). Every form is converted exactly;
//! nothing ever passes through a float. Output is always canonical: an integer
//! when the denominator is one, `p/q` otherwise.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("empty number literal")]
    Empty,
    #[error("malformed number literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses an exact rational literal.
pub fn parse_rational(text: &str) -> Result<Rational, NumberError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(NumberError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num).ok_or_else(|| NumberError::Malformed(s.to_string()))?;
        let d = parse_decimal(den).ok_or_else(|| NumberError::Malformed(s.to_string()))?;
        if d.is_zero() {
            return Err(NumberError::ZeroDenominator(s.to_string()));
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(|| NumberError::Malformed(s.to_string()))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().ok()?);
    let mut shift = -(frac_part.len() as i64);
    if let Some(exp) = exponent {
        let (sign, mag) = match exp.as_bytes().first()? {
            b'-' => (-1, &exp[1..]),
            b'+' => (1, &exp[1..]),
            _ => (1, exp),
        };
        if mag.is_empty() || !mag.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        shift += sign * mag.parse::<i64>().ok()?;
    }
    let ten = BigInt::from(10u32);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= Rational::from_integer(scale);
    } else {
        value /= Rational::from_integer(scale);
    }
    Some(if negative { -value } else { value })
}

/// Canonical text form: `p` or `p/q` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Shorthand used heavily in tests and presets.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact seconds. Used for lifetimes, periods, transit durations and the
/// engine's hidden scheduling coordinate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Seconds(pub Rational);

impl Seconds {
    pub fn zero() -> Self {
        Seconds(Rational::zero())
    }

    pub fn new(r: Rational) -> Self {
        Seconds(r)
    }

    pub fn parse(text: &str) -> Result<Self, NumberError> {
        parse_rational(text).map(Seconds)
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }
}

impl fmt::Display for Seconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl Add for &Seconds {
    type Output = Seconds;
    fn add(self, rhs: &Seconds) -> Seconds {
        Seconds(&self.0 + &rhs.0)
    }
}

impl Sub for &Seconds {
    type Output = Seconds;
    fn sub(self, rhs: &Seconds) -> Seconds {
        Seconds(&self.0 - &rhs.0)
    }
}

impl Mul<&Rational> for &Seconds {
    type Output = Seconds;
    fn mul(self, rhs: &Rational) -> Seconds {
        Seconds(&self.0 * rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_literal_form() {
        assert_eq!(parse_rational("42").unwrap(), int(42));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("3.").unwrap(), int(3));
        assert_eq!(parse_rational("1.5e-15").unwrap(), ratio(15, 10_000_000_000_000_000));
        assert_eq!(parse_rational("2E3").unwrap(), int(2000));
        assert_eq!(parse_rational("4/6").unwrap(), ratio(2, 3));
        assert_eq!(parse_rational("-1/3").unwrap(), ratio(-1, 3));
        assert_eq!(parse_rational("1e-2/5").unwrap(), ratio(1, 500));
    }

    #[test]
    fn scientific_is_exact_at_tiny_scales() {
        let t = parse_rational("5e-24").unwrap();
        let expected = Rational::new(
            BigInt::from(5),
            num_traits::pow(BigInt::from(10), 24),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_rational(""), Err(NumberError::Empty));
        assert!(matches!(parse_rational("abc"), Err(NumberError::Malformed(_))));
        assert!(matches!(parse_rational("1e"), Err(NumberError::Malformed(_))));
        assert!(matches!(parse_rational("."), Err(NumberError::Malformed(_))));
        assert!(matches!(parse_rational("1/0"), Err(NumberError::ZeroDenominator(_))));
        assert!(matches!(parse_rational("1/2/3"), Err(NumberError::Malformed(_))));
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format_rational(&int(5)), "5");
        assert_eq!(format_rational(&ratio(10, 4)), "5/2");
        assert_eq!(format_rational(&ratio(-1, 3)), "-1/3");
        assert_eq!(format_rational(&int(0)), "0");
    }

    proptest::proptest! {
        #[test]
        fn format_then_parse_is_identity(n in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
            let r = ratio(n, d);
            proptest::prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
}
