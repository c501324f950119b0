//! Exact rational arithmetic helpers shared by the verification paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{MatchError, Result};

/// Exact rational number used for all probability computations.
pub type Rational = BigRational;

pub fn zero() -> Rational {
    BigRational::zero()
}

pub fn one() -> Rational {
    BigRational::one()
}

pub fn from_ints(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, a plain integer, or a decimal float string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p
            .trim()
            .parse()
            .map_err(|_| MatchError::Parse(format!("bad numerator in {s:?}")))?;
        let den: BigInt = q
            .trim()
            .parse()
            .map_err(|_| MatchError::Parse(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(MatchError::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Ok(int) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(int));
    }
    let f: f64 = s
        .parse()
        .map_err(|_| MatchError::Parse(format!("not a rational: {s:?}")))?;
    BigRational::from_float(f).ok_or_else(|| MatchError::Parse(format!("non-finite value {s:?}")))
}

/// Renders a rational as `"p/q"` (or `"p"` when the denominator is 1).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_float() {
        assert_eq!(parse_rational("3/10").unwrap(), from_ints(3, 10));
        assert_eq!(parse_rational(" 1/4 ").unwrap(), from_ints(1, 4));
        assert_eq!(parse_rational("2").unwrap(), from_ints(2, 1));
        assert_eq!(parse_rational("0.25").unwrap(), from_ints(1, 4));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format_rational(&from_ints(2, 4)), "1/2");
        assert_eq!(format_rational(&from_ints(4, 1)), "4");
    }
}
