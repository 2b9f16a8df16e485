//! Exact rational arithmetic helpers.
//!
//! Edge lengths, distances and search times are kept as arbitrary-precision
//! rationals so that oracle comparisons are exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

pub fn pow2(exp: u32) -> Rational {
    Rational::from_integer(BigInt::one() << exp)
}

pub fn sum<'a>(items: impl IntoIterator<Item = &'a Rational>) -> Rational {
    items.into_iter().fold(Rational::zero(), |acc, x| acc + x)
}

/// Parses `"3"`, `"2.75"`, `"-1.5"` or `"7/3"` into an exact rational.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, fraction) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && fraction.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !fraction.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{fraction}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num_traits::pow(BigInt::from(10), fraction.len());
    let value = Rational::new(numer, denom);
    Some(if neg { -value } else { value })
}

/// Renders a rational as a terminating decimal when one exists, else as `p/q`.
/// [`parse`] reads either form back to the identical value.
pub fn format(x: &Rational) -> String {
    if x.is_integer() {
        return x.numer().to_string();
    }
    let mut denom = x.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{}/{}", x.numer(), x.denom());
    }
    let places = twos.max(fives);
    let scaled = x.abs() * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (head, tail) = digits.split_at(digits.len() - places);
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}{head}.{tail}")
}

/// Formats a float with 12 significant digits, as used in CSV reports.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.*e}", 11, x);
    let v: f64 = s.parse().unwrap_or(x);
    let out = format!("{v}");
    if out.len() > 20 {
        s
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse("3"), Some(int(3)));
        assert_eq!(parse("2.5"), Some(frac(5, 2)));
        assert_eq!(parse("0.50"), Some(frac(1, 2)));
        assert_eq!(parse(".25"), Some(frac(1, 4)));
        assert_eq!(parse("-1.5"), Some(frac(-3, 2)));
        assert_eq!(parse("7/3"), Some(frac(7, 3)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("abc"), None);
        assert_eq!(parse("1e3"), None);
        assert_eq!(parse(""), None);
    }

    #[test]
    fn formats_terminating_decimals() {
        assert_eq!(format(&frac(5, 2)), "2.5");
        assert_eq!(format(&frac(1, 8)), "0.125");
        assert_eq!(format(&frac(-3, 40)), "-0.075");
        assert_eq!(format(&int(4)), "4");
        assert_eq!(format(&frac(7, 3)), "7/3");
    }

    #[test]
    fn sig12() {
        assert_eq!(format_sig12(1.4), "1.4");
        assert_eq!(format_sig12(2.0), "2");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(n in -100_000i64..100_000, d in 1i64..5000) {
            let x = frac(n, d);
            prop_assert_eq!(parse(&format(&x)), Some(x));
        }
    }
}
