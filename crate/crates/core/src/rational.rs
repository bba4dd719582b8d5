//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for every coordinate in the library.
pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `floor(q)` as `i64`. Panics when out of range, which only happens for
/// coordinates far beyond anything a degree-one map can reach.
pub fn floor_i64(q: &Rational) -> i64 {
    q.floor()
        .to_integer()
        .to_i64()
        .expect("rational floor out of i64 range")
}

pub fn ceil_i64(q: &Rational) -> i64 {
    q.ceil()
        .to_integer()
        .to_i64()
        .expect("rational ceil out of i64 range")
}

/// Integer value of `q` if it is an integer fitting in `i64`.
pub fn as_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses `p/q`, `p`, with optional sign. Whitespace around the token is ignored.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    if s.is_empty() {
        return Err("empty rational".into());
    }
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("invalid numerator in `{s}`"))?;
    let d: BigInt = d.parse().map_err(|_| format!("invalid denominator in `{s}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(BigRational::new(n, d))
}

/// Lowest terms with an explicit sign on nonzero values: `+1/2`, `-3`, `0`.
pub fn fmt_signed(q: &Rational) -> String {
    if q.is_zero() {
        "0".to_string()
    } else if q.is_positive() {
        format!("+{q}")
    } else {
        format!("{q}")
    }
}

/// `min(a, b)` by reference.
pub fn min_ref<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_ref<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}

/// Greatest common divisor of two machine integers, `gcd(0, 0) = 0`.
pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Rational {
    BigRational::from_float(x).expect("finite tolerance")
}
