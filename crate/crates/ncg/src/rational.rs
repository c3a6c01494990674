//! Helpers around exact rational values as they appear on the CLI and in
//! files: `"p/q"` or a plain integer string, never floats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RationalError {
    #[error("cannot parse {0:?} as a rational (expected \"p/q\" or an integer)")]
    Parse(String),
    #[error("value must be positive, got {0}")]
    NotPositive(String),
}

/// Parses `"p/q"` or an integer string into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, RationalError> {
    let trimmed = text.trim();
    match trimmed.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num
                .trim()
                .parse()
                .map_err(|_| RationalError::Parse(text.to_string()))?;
            let den: BigInt = den
                .trim()
                .parse()
                .map_err(|_| RationalError::Parse(text.to_string()))?;
            if den.is_zero() {
                return Err(RationalError::Parse(text.to_string()));
            }
            Ok(BigRational::new(num, den))
        }
        None => {
            let num: BigInt = trimmed
                .parse()
                .map_err(|_| RationalError::Parse(text.to_string()))?;
            Ok(BigRational::from_integer(num))
        }
    }
}

/// Parses a rational and rejects zero or negative values.
pub fn parse_positive_rational(text: &str) -> Result<BigRational, RationalError> {
    let value = parse_rational(text)?;
    if value.is_positive() {
        Ok(value)
    } else {
        Err(RationalError::NotPositive(rational_string(&value)))
    }
}

/// Canonical text form: reduced `"p/q"`, or `"p"` when the denominator is 1.
pub fn rational_string(value: &BigRational) -> String {
    value.to_string()
}

pub fn rational_from_u64(value: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn rational_from_usize(value: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest `f64`; only used by the explicitly approximate bound evaluators.
pub fn rational_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_integer() {
        assert_eq!(parse_rational("7/2").unwrap(), ratio(7, 2));
        assert_eq!(parse_rational("5").unwrap(), ratio(5, 1));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-3/2").unwrap(), ratio(-3, 2));
    }

    #[test]
    fn rejects_garbage_and_zero_denominator() {
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_positive_rational("0").is_err());
        assert!(parse_positive_rational("-1/2").is_err());
    }

    #[test]
    fn canonical_display_is_reduced() {
        assert_eq!(rational_string(&parse_rational("6/4").unwrap()), "3/2");
        assert_eq!(rational_string(&parse_rational("8/2").unwrap()), "4");
    }
}
