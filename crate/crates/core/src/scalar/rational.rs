//! Arbitrary-precision rationals and the handful of helpers built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number in canonical form (reduced, positive denominator).
pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Re-establishes canonical form. `BigRational` arithmetic already keeps it,
/// so this is mainly useful for values built from raw parts.
pub fn normalize(r: &Rational) -> Rational {
    Rational::new(r.numer().clone(), r.denom().clone())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

/// Text form `p/q`; integers print without the slash.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, integers, exact decimals (`0.125`, `1e-3`) and powers
/// such as `2^-14` or `10^-3`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse `{s}` as a rational"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((b, e)) = s.split_once('^') {
        let base = parse_rational(b)?;
        let exp: i32 = e.trim().parse().map_err(|_| bad())?;
        if base.is_zero() && exp < 0 {
            return Err(Error::DivisionByZero);
        }
        return Ok(pow_i(&base, exp));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(p / q);
    }
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{whole}{frac}");
    let n: BigInt = all.parse().map_err(|_| bad())?;
    let mut v = Rational::new(n, BigInt::from(10).pow(frac.len() as u32));
    v *= pow_i(&int(10), exp10);
    Ok(if neg { -v } else { v })
}

pub fn pow_i(base: &Rational, exp: i32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Largest multiple of `2^-bits` not exceeding `x`.
pub fn floor_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

/// Smallest multiple of `2^-bits` not below `x`.
pub fn ceil_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(scale.clone());
    Rational::new(scaled.ceil().to_integer(), scale)
}

pub fn round_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(scale.clone());
    Rational::new(scaled.round().to_integer(), scale)
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

/// Common denominator (lcm of all denominators).
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Complex number with rational parts; used for certified evaluation at
/// complex root enclosures.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn from_real(re: Rational) -> Self {
        Self::new(re, Rational::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let den = &o.re * &o.re + &o.im * &o.im;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = self.mul(&Self::new(o.re.clone(), -o.im.clone()));
        Ok(Self::new(num.re / &den, num.im / den))
    }

    /// `|re| + |im|`, an upper bound for the modulus.
    pub fn l1(&self) -> Rational {
        self.re.abs() + self.im.abs()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn round_dyadic(&self, bits: u32) -> Self {
        Self::new(round_dyadic(&self.re, bits), round_dyadic(&self.im, bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_text_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("2^-4").unwrap(), rat(1, 16));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("abc").is_err());
        assert_eq!(parse_rational("1/0"), Err(Error::DivisionByZero));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let r = Rational::new_raw(BigInt::from(6), BigInt::from(-4));
        let once = normalize(&r);
        assert_eq!(once, rat(-3, 2));
        assert_eq!(normalize(&once), once);
        assert_eq!(format_rational(&once), "-3/2");
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let x = rat(1, 3);
        let lo = floor_dyadic(&x, 10);
        let hi = ceil_dyadic(&x, 10);
        assert!(lo <= x && x <= hi);
        assert_eq!(&hi - &lo, rat(1, 1024));
    }

    #[test]
    fn rational_arithmetic_examples() {
        assert_eq!(rat(1, 2) + rat(1, 3), rat(5, 6));
        assert_eq!(to_f64(&rat(5, 6)), 5.0 / 6.0);
    }
}
