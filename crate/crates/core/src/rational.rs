//! Exact rational scalars.
//!
//! All model parameters (`beta`, the dynamical couplings `a` and `b`) and all
//! spectrum energies are kept as arbitrary-precision rationals so that levels
//! merge, compare and dualize exactly.  This module provides the alias plus
//! the parsing/printing conventions used at the interfaces: a rational is
//! written `P/Q` or as a plain integer, and is also accepted in decimal form
//! (`12.25` -> `49/4`), which converts exactly digit by digit.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{FiError, Result};

pub type Rational = num_rational::BigRational;

/// Parses `P/Q`, a plain integer, or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(FiError::domain("empty rational literal"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let p: BigInt = num
            .trim()
            .parse()
            .map_err(|_| FiError::domain(format!("invalid numerator in {s:?}")))?;
        let q: BigInt = den
            .trim()
            .parse()
            .map_err(|_| FiError::domain(format!("invalid denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(FiError::domain(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(FiError::domain(format!("invalid decimal literal {s:?}")));
        }
        let negative = int_part.starts_with('-');
        let int_digits = if int_part == "-" || int_part.is_empty() {
            "0".to_string()
        } else {
            int_part.trim_start_matches(['+', '-']).to_string()
        };
        let whole: BigInt = format!("{int_digits}{frac_part}")
            .parse()
            .map_err(|_| FiError::domain(format!("invalid decimal literal {s:?}")))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let value = Rational::new(whole, scale);
        return Ok(if negative { -value } else { value });
    }
    let p: BigInt = s
        .parse()
        .map_err(|_| FiError::domain(format!("invalid rational literal {s:?}")))?;
    Ok(Rational::from_integer(p))
}

/// Canonical text form: `P` for integers, `P/Q` otherwise.
pub fn rational_to_string(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Rounds to `digits` decimal places (half away from zero), exactly.
pub fn round_to_decimal_digits(value: &Rational, digits: u32) -> Rational {
    let scale = Rational::from_integer(BigInt::from(10u32).pow(digits));
    let scaled = value * &scale;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let shifted = if scaled.is_negative() {
        (scaled - half).ceil()
    } else {
        (scaled + half).floor()
    };
    shifted / scale
}

/// Nearest `f64`; NaN when the value overflows the double range.
pub fn rational_to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn rational_from_u64(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn rational_from_i64(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("49/4").unwrap(), Rational::new(49.into(), 4.into()));
        assert_eq!(parse_rational("10").unwrap(), rational_from_u64(10));
        assert_eq!(parse_rational("12.25").unwrap(), Rational::new(49.into(), 4.into()));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational(" 21/2 ").unwrap(), Rational::new(21.into(), 2.into()));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a.b").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("1e3").is_err());
    }

    #[test]
    fn prints_canonical_form() {
        assert_eq!(rational_to_string(&parse_rational("14/4").unwrap()), "7/2");
        assert_eq!(rational_to_string(&parse_rational("12").unwrap()), "12");
    }

    #[test]
    fn rounding_to_decimal_digits() {
        let pi_ish = parse_rational("3.14159").unwrap();
        let rounded = round_to_decimal_digits(&pi_ish, 2);
        assert_eq!(rounded, parse_rational("3.14").unwrap());
        let x = parse_rational("-2.675").unwrap();
        assert_eq!(round_to_decimal_digits(&x, 2), parse_rational("-2.68").unwrap());
        assert_eq!(round_to_decimal_digits(&x, 2).to_f64().unwrap(), -2.68);
    }
}
