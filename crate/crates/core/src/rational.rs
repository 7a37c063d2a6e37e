//! Exact rational numbers and their text forms.
//!
//! Values, probabilities and prices are all [`Rational`]. Text input accepts
//! `"p/q"`, integers, and decimal strings such as `"0.125"` or `"1e-3"`; every
//! form converts exactly.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `p/q` as a [`Rational`]. Panics when `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{whole}{frac}");
    let mut numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| bad())?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Canonical text form: `"p/q"`, or `"p"` for integers.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Decimal rendering by exact long division, truncated after `places`
/// fractional digits. The flag is `true` when the rendering is exact.
pub fn to_decimal(value: &Rational, places: usize) -> (String, bool) {
    let mut out = String::new();
    if value.is_negative() {
        out.push('-');
    }
    let numer = value.numer().abs();
    let denom = value.denom().clone();
    let (whole, mut rem) = numer.div_rem(&denom);
    write!(out, "{whole}").unwrap();
    if rem.is_zero() {
        return (out, true);
    }
    out.push('.');
    let ten = BigInt::from(10);
    for _ in 0..places {
        rem *= &ten;
        let (digit, r) = rem.div_rem(&denom);
        write!(out, "{digit}").unwrap();
        rem = r;
        if rem.is_zero() {
            return (out, true);
        }
    }
    (out, false)
}

/// `"6293/1000 (6.293)"`; inexact decimals end in `...`.
pub fn describe(value: &Rational) -> String {
    format!("{} ({})", format_rational(value), decimal_string(value))
}

pub fn decimal_string(value: &Rational) -> String {
    let (text, exact) = to_decimal(value, 12);
    if exact {
        text
    } else {
        format!("{text}...")
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Very large numerators and denominators: scale down first.
        let n = value.numer().to_f64().unwrap_or(f64::NAN);
        let d = value.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact value of a finite `f64` (every finite double is dyadic).
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn ceil_to_int(value: &Rational) -> BigInt {
    value.ceil().to_integer()
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -3/6 ").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("6.293").unwrap(), rat(6293, 1000));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), int(250));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "abc", "1.2.3", "--1", "1/x", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(6293, 1000), 12), ("6.293".into(), true));
        assert_eq!(to_decimal(&rat(61, 25), 12), ("2.44".into(), true));
        assert_eq!(
            to_decimal(&rat(1, 3), 12),
            ("0.333333333333".into(), false)
        );
        assert_eq!(to_decimal(&rat(-7, 2), 12), ("-3.5".into(), true));
        assert_eq!(describe(&rat(6293, 1000)), "6293/1000 (6.293)");
        assert_eq!(decimal_string(&rat(2, 3)), "0.666666666666...");
    }

    #[test]
    fn float_conversion_is_exact() {
        let r = from_f64(0.1).unwrap();
        assert_eq!(to_f64(&r), 0.1);
        assert_ne!(r, rat(1, 10));
    }
}
