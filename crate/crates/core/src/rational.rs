//! Exact rational helpers shared by the decision tables and the grammar.
//!
//! Exponents and integrability indices are kept as `BigRational` so that
//! knife-edge comparisons such as `q = min{p, 2}` or `b·r = -1` are decided
//! exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Exact rational number.
pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Q) -> f64 {
    // Ratio::to_f64 handles large numerators/denominators without overflow.
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Canonical text form: `3`, `-1/2`.
pub fn q_display(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `12`, `-0.125`, `+3/4` or `1.5/2` exactly.
pub fn parse_q(text: &str) -> Result<Q, ParseError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(ParseError::new(0, "expected a number"));
    }
    match t.split_once('/') {
        Some((num, den)) => {
            let n = parse_decimal(num)?;
            let d = parse_decimal(den).map_err(|e| e.shifted(num.len() + 1))?;
            if d.is_zero() {
                return Err(ParseError::new(num.len() + 1, "zero denominator"));
            }
            Ok(n / d)
        }
        None => parse_decimal(t),
    }
}

fn parse_decimal(text: &str) -> Result<Q, ParseError> {
    let (negative, body) = match text.as_bytes().first() {
        Some(b'-') => (true, &text[1..]),
        Some(b'+') => (false, &text[1..]),
        _ => (false, text),
    };
    let offset = text.len() - body.len();
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(ParseError::new(offset, "expected digits"));
    }
    for (i, ch) in int_part.chars().chain(frac_part.chars()).enumerate() {
        if !ch.is_ascii_digit() {
            let pos = if i < int_part.len() { i } else { i + 1 };
            return Err(ParseError::new(offset + pos, format!("unexpected character '{ch}'")));
        }
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().expect("validated digits")
    };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = Q::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// `(x)_+`
pub fn q_pos_part(x: Q) -> Q {
    if x.is_negative() {
        Q::zero()
    } else {
        x
    }
}

/// Least integer strictly greater than `x`.
pub fn q_floor_plus_one(x: &Q) -> BigInt {
    x.floor().to_integer() + 1
}

/// The rational with the smallest denominator in the closed interval `[lo, hi]`.
///
/// Stern–Brocot descent via continued fractions.
pub fn simplest_between(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi, "empty interval");
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if fl.clone() + Q::one() <= *hi {
        return fl + Q::one();
    }
    // Same integer part: recurse on reciprocals of the fractional parts.
    let lo_frac = lo - &fl;
    let hi_frac = hi - &fl;
    let inner = simplest_between(&hi_frac.recip(), &lo_frac.recip());
    fl + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_q("0.5").unwrap(), q_frac(1, 2));
        assert_eq!(parse_q("-1/2").unwrap(), q_frac(-1, 2));
        assert_eq!(parse_q("3").unwrap(), q_int(3));
        assert_eq!(parse_q(".25").unwrap(), q_frac(1, 4));
        assert_eq!(parse_q("1.5/3").unwrap(), q_frac(1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
        assert!(parse_q("-").is_err());
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(q_display(&q_frac(2, 4)), "1/2");
        assert_eq!(q_display(&q_frac(-6, 3)), "-2");
    }

    #[test]
    fn simplest_rational_in_interval() {
        let eps = q_frac(1, 1 << 40);
        let target = q_frac(5, 12);
        let got = simplest_between(&(target.clone() - &eps), &(target.clone() + &eps));
        assert_eq!(got, target);
        assert_eq!(simplest_between(&q_frac(1, 3), &q_frac(2, 3)), q_frac(1, 2));
        assert_eq!(simplest_between(&q_frac(-7, 4), &q_frac(-3, 2)), q_frac(-3, 2));
        assert_eq!(simplest_between(&q_frac(-1, 2), &q_frac(1, 2)), q_int(0));
    }

    #[test]
    fn floor_plus_one_is_strict() {
        assert_eq!(q_floor_plus_one(&q_int(2)), BigInt::from(3));
        assert_eq!(q_floor_plus_one(&q_frac(-5, 2)), BigInt::from(-2));
    }
}
