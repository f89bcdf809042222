//! Exact rational helpers shared by the geometry modules.
//!
//! Rationals cross every text boundary as `"p/q"` strings (integers are
//! written without the `/1`). The serde adaptors in this module are used with
//! `#[serde(with = ...)]` on report fields.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A point with exact coordinates.
pub type Point = Vec<Rational>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn point(coords: &[(i64, i64)]) -> Point {
    coords.iter().map(|&(n, d)| rat(n, d)).collect()
}

/// Parses `"p/q"`, `"p"`, or a finite decimal literal such as `"-0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s)
}

/// Exact value of a decimal literal (optional sign, digits, optional fraction,
/// optional exponent).
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

/// Rounds `value` to the nearest multiple of `1/denominator` (ties away from zero).
pub fn round_to_denominator(value: &Rational, denominator: &BigInt) -> Rational {
    let scaled = value * Rational::from_integer(denominator.clone());
    Rational::new(scaled.round().to_integer(), denominator.clone())
}

/// Exact rational nearest to `x` with `digits` decimal places.
pub fn quantize(x: f64, digits: u32) -> Rational {
    assert!(x.is_finite(), "cannot quantize a non-finite value");
    let exact = Rational::from_float(x).expect("finite float");
    round_to_denominator(&exact, &num_traits::pow(BigInt::from(10), digits as usize))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 fails only on huge operands; fall back to a scaled quotient.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

/// `#[serde(with = "rational::as_str")]`
pub mod as_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "rational::vec_as_str")]` for points and other rational lists.
pub mod vec_as_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// `#[serde(with = "rational::points_as_str")]` for lists of points.
pub mod points_as_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ps: &[Point], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(ps.iter().map(|p| p.iter().map(format_rational).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Point>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.iter()
            .map(|p| p.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

/// Optional point variant of [`vec_as_str`].
pub mod opt_vec_as_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &Option<Vec<Rational>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match xs {
            Some(v) => s.collect_seq(v.iter().map(format_rational)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Rational>>, D::Error> {
        let raw = Option::<Vec<String>>::deserialize(d)?;
        raw.map(|v| v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect())
            .transpose()
    }
}

/// Optional variant of [`points_as_str`].
pub mod opt_points_as_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ps: &Option<Vec<Point>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        ps.as_ref()
            .map(|ps| ps.iter().map(|p| p.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Point>>, D::Error> {
        let raw = Option::<Vec<Vec<String>>>::deserialize(d)?;
        raw.map(|ps| {
            ps.iter()
                .map(|p| p.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect())
                .collect()
        })
        .transpose()
    }
}
