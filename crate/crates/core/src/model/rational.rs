//! Exact rational helpers.
//!
//! Every cycle time, cost and frequency in the crate is a [`Rational`]
//! (an arbitrary-precision fraction kept in lowest terms). Floating point
//! only appears at the presentation layer and in the inexact branch of
//! [`sqrt`].

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision fraction, always normalized (`gcd(|num|, den) = 1`, `den > 0`).
pub type Rational = BigRational;

/// Default number of significant digits for decimal renderings.
pub const DEFAULT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}` in rational literal")]
    BadInteger(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"num/den"` or a bare integer `"num"`.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let parse = |s: &str| -> Result<BigInt, RationalParseError> {
        if s.is_empty() || s.starts_with("+-") || s.starts_with("-+") {
            return Err(RationalParseError::BadInteger(s.to_string()));
        }
        s.parse::<BigInt>()
            .map_err(|_| RationalParseError::BadInteger(s.to_string()))
    };
    let num = parse(num)?;
    let den = parse(den)?;
    if den.is_zero() {
        return Err(RationalParseError::ZeroDenominator(text.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// Renders as `"num/den"`, including integers (`"5/1"`).
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_biguint(value: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, value.clone()))
}

/// `2^exp` for any signed exponent.
pub fn pow2(exp: i64) -> Rational {
    let magnitude = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        Rational::from_integer(magnitude)
    } else {
        Rational::new(BigInt::one(), magnitude)
    }
}

pub fn is_positive(value: &Rational) -> bool {
    value.numer().sign() == Sign::Plus
}

/// Nearest `f64`, accurate for magnitudes far outside the `f64` range of
/// the numerator or denominator alone.
pub fn to_f64(value: &Rational) -> f64 {
    let num = value.numer();
    if num.is_zero() {
        return 0.0;
    }
    let negative = num.is_negative();
    let n = num.magnitude();
    let d = value.denom().magnitude();
    // Bring the quotient to ~64 significant bits, then rescale.
    let shift = n.bits() as i64 - d.bits() as i64 - 64;
    let scaled = if shift >= 0 {
        n / (d << shift as u64)
    } else {
        (n << (-shift) as u64) / d
    };
    let mantissa = scaled.to_f64().unwrap_or(f64::INFINITY);
    let magnitude = scale_by_pow2(mantissa, shift);
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

fn scale_by_pow2(mut x: f64, mut exp: i64) -> f64 {
    while exp > 1000 {
        x *= 2f64.powi(1000);
        exp -= 1000;
    }
    while exp < -1000 {
        x *= 2f64.powi(-1000);
        exp += 1000;
    }
    x * 2f64.powi(exp as i32)
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Smallest-denominator continued-fraction convergent within `rel_tol` of `x`.
///
/// Falls back to the exact binary value when no convergent qualifies.
pub fn approximate(x: f64, rel_tol: f64) -> Rational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    if x == 0.0 {
        return Rational::zero();
    }
    let exact = from_f64(x).expect("finite");
    let target = x.abs();
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut rest = exact.abs();
    for _ in 0..64 {
        let a = rest.floor().to_integer();
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let candidate = Rational::new(h.clone(), k.clone());
        if ((to_f64(&candidate) - target) / target).abs() <= rel_tol {
            return if x < 0.0 { -candidate } else { candidate };
        }
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    exact
}

/// Square root of a non-negative rational: exact when it is a perfect
/// square of a rational, otherwise a flagged `f64` approximation.
#[derive(Debug, Clone, PartialEq)]
pub enum Root {
    Exact(Rational),
    Inexact(f64),
}

impl Root {
    pub fn is_exact(&self) -> bool {
        matches!(self, Root::Exact(_))
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Root::Exact(r) => Some(r),
            Root::Inexact(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Root::Exact(r) => to_f64(r),
            Root::Inexact(x) => *x,
        }
    }

    /// The exact value, or a rational approximation within `1e-15` relative.
    pub fn to_rational(&self) -> Rational {
        match self {
            Root::Exact(r) => r.clone(),
            Root::Inexact(x) => approximate(*x, 1e-15),
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Root::Exact(r) => write!(f, "{}", format_rational(r)),
            Root::Inexact(x) => write!(f, "~{x:.15e}"),
        }
    }
}

fn exact_isqrt(value: &BigInt) -> Option<BigInt> {
    let root = value.sqrt();
    (&root * &root == *value).then_some(root)
}

/// Square root with exact detection. Panics on negative input.
pub fn sqrt(value: &Rational) -> Root {
    assert!(!value.is_negative(), "sqrt of negative rational");
    if let (Some(n), Some(d)) = (exact_isqrt(value.numer()), exact_isqrt(value.denom())) {
        return Root::Exact(Rational::new(n, d));
    }
    // sqrt(n/d) = sqrt(n*d*4^k) / (d*2^k), with k chosen for ~96 bits of root.
    let n = value.numer();
    let d = value.denom();
    let product = n * d;
    let bits = product.bits() as i64;
    let k = ((192 - bits).max(0) / 2 + 1) as u64;
    let root = (product << (2 * k)).sqrt();
    let approx = Rational::new(root, d << k);
    Root::Inexact(to_f64(&approx))
}

/// Decimal rendering with `digits` significant digits (round half up).
///
/// Plain notation for magnitudes in `[1e-6, 1e15)`, scientific otherwise.
/// Trailing fractional zeros are trimmed.
pub fn to_decimal(value: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let magnitude = value.abs();
    let ten = BigInt::from(10);
    let mut exp = to_f64(&magnitude).log10().floor() as i64;
    let pow10 = |e: i64| -> Rational {
        let p = num_traits::pow(ten.clone(), e.unsigned_abs() as usize);
        if e >= 0 {
            Rational::from_integer(p)
        } else {
            Rational::new(BigInt::one(), p)
        }
    };
    // Correct the float estimate so that 10^exp <= magnitude < 10^(exp+1).
    while pow10(exp) > magnitude {
        exp -= 1;
    }
    while pow10(exp + 1) <= magnitude {
        exp += 1;
    }
    let scaled = &magnitude * pow10(digits as i64 - 1 - exp);
    let mut mantissa = (scaled + ratio(1, 2)).floor().to_integer();
    if mantissa >= num_traits::pow(ten.clone(), digits) {
        mantissa /= &ten;
        exp += 1;
    }
    let text = mantissa.to_string();
    let body = if (-6..15).contains(&exp) {
        place_point(&text, exp)
    } else {
        let (lead, rest) = text.split_at(1);
        let frac = rest.trim_end_matches('0');
        if frac.is_empty() {
            format!("{lead}e{exp}")
        } else {
            format!("{lead}.{frac}e{exp}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn place_point(digits: &str, exp: i64) -> String {
    let len = digits.len() as i64;
    let int_len = exp + 1;
    let (int_part, frac_part) = if int_len <= 0 {
        (
            "0".to_string(),
            format!("{}{}", "0".repeat((-int_len) as usize), digits),
        )
    } else if int_len >= len {
        (
            format!("{}{}", digits, "0".repeat((int_len - len) as usize)),
            String::new(),
        )
    } else {
        let (a, b) = digits.split_at(int_len as usize);
        (a.to_string(), b.to_string())
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        int_part
    } else {
        format!("{int_part}.{frac_part}")
    }
}
