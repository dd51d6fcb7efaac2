//! Numeric backends: exact big rationals and IEEE doubles behind one trait.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    const BACKEND: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_biguint(v: &BigUint) -> Self;
    fn from_f64(v: f64) -> Result<Self>;
    fn from_param(p: &Param) -> Result<Self>;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn as_integer(&self) -> Option<i64>;
    fn abs_val(&self) -> Self;
    fn format(&self) -> String;
    fn parse(s: &str) -> Result<Self>;

    fn from_usize(v: usize) -> Self {
        Self::from_int(v as i64)
    }

    fn is_positive(&self) -> bool {
        !self.is_zero() && !self.is_negative()
    }

    fn powi(&self, k: usize) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |a, b| a + b)
    }

    /// Exact equality for rationals, `|a - b| <= tol * max(1, |a|, |b|)` for doubles.
    fn close(&self, other: &Self, tol: f64) -> bool;
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const BACKEND: &'static str = "exact";

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_biguint(v: &BigUint) -> Self {
        Rational::from_integer(BigInt::from(v.clone()))
    }
    fn from_f64(v: f64) -> Result<Self> {
        Err(Error::NotExact(format!("floating value {v}")))
    }
    fn from_param(p: &Param) -> Result<Self> {
        p.exact
            .clone()
            .ok_or_else(|| Error::NotExact(format!("parameter {p} is a decimal")))
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn as_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.to_integer().to_i64()
        } else {
            None
        }
    }
    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
    fn format(&self) -> String {
        self.to_string()
    }
    fn parse(s: &str) -> Result<Self> {
        parse_rational(s)
    }
    fn close(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const BACKEND: &'static str = "float";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_biguint(v: &BigUint) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }
    fn from_f64(v: f64) -> Result<Self> {
        Ok(v)
    }
    fn from_param(p: &Param) -> Result<Self> {
        Ok(p.value)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn as_integer(&self) -> Option<i64> {
        if self.fract() == 0.0 && f64::abs(*self) < 9.0e15 {
            Some(*self as i64)
        } else {
            None
        }
    }
    fn abs_val(&self) -> Self {
        f64::abs(*self)
    }
    fn format(&self) -> String {
        format_f64(*self)
    }
    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a: f64 = a.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
            let b: f64 = b.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
            return Ok(a / b);
        }
        s.parse().map_err(|_| Error::Parse(s.to_string()))
    }
    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        // Neumaier compensated summation
        let mut sum = 0.0f64;
        let mut c = 0.0f64;
        for x in items {
            let t = sum + x;
            if f64::abs(sum) >= f64::abs(x) {
                c += (sum - t) + x;
            } else {
                c += (x - t) + sum;
            }
            sum = t;
        }
        sum + c
    }
    fn close(&self, other: &Self, tol: f64) -> bool {
        let scale = 1.0f64.max(f64::abs(*self)).max(f64::abs(*other));
        f64::abs(self - other) <= tol * scale
    }
}

fn ratio_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // scale down huge numerators/denominators before dividing
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb.max(db) - 1000).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(0.0);
    if d == 0.0 {
        if Signed::is_negative(r) {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        n / d
    }
}

/// Seventeen significant digits.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        let dec = (16 - e).max(0) as usize;
        format!("{x:.dec$}")
    } else {
        format!("{x:.16e}")
    }
}

/// Accepts "a/b", integers, and finite decimals such as "0.25" or "-1.5".
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.contains('/') {
        let (a, b) = s.split_once('/').ok_or_else(err)?;
        let a = BigInt::from_str(a.trim()).map_err(|_| err())?;
        let b = BigInt::from_str(b.trim()).map_err(|_| err())?;
        if b.is_zero() {
            return Err(Error::DivisionByZero(format!("fraction {s:?}")));
        }
        return Ok(Rational::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac.is_empty())
        {
            return Err(err());
        }
        let digits = format!("{int_digits}{frac}");
        let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| err())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| err())
}

/// A model parameter: an exact rational when one was given, always with its double value.
#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    exact: Option<Rational>,
    value: f64,
}

impl Param {
    pub fn exact(r: Rational) -> Self {
        let value = ratio_to_f64(&r);
        Param { exact: Some(r), value }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Param::exact(Rational::from_ratio(num, den))
    }

    pub fn int(v: i64) -> Self {
        Param::exact(Rational::from_int(v))
    }

    pub fn float(value: f64) -> Self {
        Param { exact: None, value }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(r) => Zero::is_zero(r),
            None => self.value == 0.0,
        }
    }

    /// Fractions and integers are exact; anything with a decimal point or exponent is a double.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(['.', 'e', 'E']) {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("not finite: {s:?}")));
            }
            return Ok(Param::float(v));
        }
        parse_rational(s).map(Param::exact)
    }

    pub fn add(&self, other: &Param) -> Param {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Param::exact(a + b),
            _ => Param::float(self.value + other.value),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => write!(f, "{r}"),
            None => {
                let s = format!("{}", self.value);
                if s.contains(['.', 'e', 'E']) {
                    write!(f, "{s}")
                } else {
                    write!(f, "{s}.0")
                }
            }
        }
    }
}

impl From<i64> for Param {
    fn from(v: i64) -> Self {
        Param::int(v)
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::float(v)
    }
}

impl From<Rational> for Param {
    fn from(r: Rational) -> Self {
        Param::exact(r)
    }
}

/// Rising factorial (a)_k = a(a+1)...(a+k-1).
pub fn rising<S: Scalar>(a: &S, k: usize) -> S {
    let mut acc = S::one();
    for i in 0..k {
        acc = acc * (a.clone() + S::from_usize(i));
    }
    acc
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub fn binomial_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from((n - i) as u64) / BigUint::from((i + 1) as u64);
    }
    acc
}

pub fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    S::from_biguint(&binomial_big(n, k))
}

/// log C(n, k) via log-gamma, for large arguments on the float backend.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    use statrs::function::gamma::ln_gamma;
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), Rational::from_ratio(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::from_ratio(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational::from_ratio(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), Rational::from_int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn param_display_round_trip() {
        for s in ["1/2", "3", "0.5", "2.0", "-1/3", "1e-3"] {
            let p = Param::parse(s).unwrap();
            let q = Param::parse(&p.to_string()).unwrap();
            assert_eq!(p, q, "{s}");
        }
        assert!(Param::parse("1/2").unwrap().is_exact());
        assert!(!Param::parse("0.5").unwrap().is_exact());
    }

    #[test]
    fn rising_and_binomials() {
        assert_eq!(rising(&Rational::from_ratio(1, 2), 3), Rational::from_ratio(15, 8));
        assert_eq!(rising(&0.0f64, 0), 1.0);
        assert_eq!(binomial_big(6, 3), BigUint::from(20u32));
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert!((ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_f64(0.5), "0.50000000000000000");
        assert_eq!(format_f64(1.0 / 3.0).len(), "0.33333333333333331".len());
        assert!(format_f64(1e-9).contains('e'));
    }

    #[test]
    fn compensated_sum() {
        let v = vec![1e16, 1.0, -1e16];
        assert_eq!(f64::sum_all(v), 1.0);
    }
}
