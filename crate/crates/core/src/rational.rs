//! Exact rational scalars and the small amount of ring plumbing shared by
//! the polynomial and group-law code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // huge numerators/denominators: fall back on a scaled division
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Closest rational with denominator `10^digits`.
pub fn from_f64(x: f64, digits: u32) -> Q {
    let scale = 10f64.powi(digits as i32);
    let n = (x * scale).round();
    Q::new(BigInt::from(n as i128), BigInt::from(10u64).pow(digits))
}

pub fn floor(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil(x: &Q) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Parse `p/q`, an integer, or a plain decimal such as `-0.25`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int = int.trim_start_matches(['-', '+']);
        let int: BigInt = if int.is_empty() { BigInt::zero() } else { int.parse().map_err(|_| bad())? };
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().map_err(|_| bad())? };
        let v = Q::new(int * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// `p/q` (or `p` for integers); the inverse of [`parse_q`].
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Commutative ring operations needed to evaluate polynomials over exact
/// rationals, polynomials themselves, or floats.
pub trait Scalar: Clone {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn from_q(c: &Q) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero_elem(&self) -> bool;

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one_elem();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl Scalar for Q {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn from_q(c: &Q) -> Self {
        c.clone()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Scalar for f64 {
    fn zero_elem() -> Self {
        0.0
    }
    fn one_elem() -> Self {
        1.0
    }
    fn from_q(c: &Q) -> Self {
        to_f64(c)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero_elem(&self) -> bool {
        *self == 0.0
    }
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Random rational `k/d` with `d` in `1..=max_den` and `|k/d| <= bound`.
pub fn random_q<R: rand::Rng + ?Sized>(rng: &mut R, bound: i64, max_den: i64) -> Q {
    let d = rng.gen_range(1..=max_den);
    let k = rng.gen_range(-bound * d..=bound * d);
    qr(k, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_q("-1/2").unwrap(), qr(-1, 2));
        assert_eq!(parse_q("0.25").unwrap(), qr(1, 4));
        assert_eq!(parse_q("-0.5").unwrap(), qr(-1, 2));
        assert_eq!(parse_q("-.5").unwrap(), qr(-1, 2));
        assert_eq!(parse_q("7").unwrap(), q(7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn floor_and_ceil_on_negatives() {
        assert_eq!(floor(&qr(-1, 2)), BigInt::from(-1));
        assert_eq!(ceil(&qr(-1, 2)), BigInt::from(0));
        assert_eq!(ceil(&qr(3, 2)), BigInt::from(2));
        assert_eq!(floor(&q(3)), BigInt::from(3));
    }

    #[test]
    fn format_round_trips() {
        for s in ["3/7", "-12", "0", "-5/3"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
    }
}
