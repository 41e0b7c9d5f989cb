//! Exact weight arithmetic.
//!
//! Weights and edge fractions are exact rationals extended with a first-order
//! symbolic perturbation: a value `a + b*eps` stands for its limit as
//! `eps -> 0+`. Comparison is lexicographic on `(a, b)` and arithmetic follows
//! dual-number rules truncated at first order. The perturbation is what lets a
//! family of hypotheses hold on to its aggregate significance level until the
//! last member is rejected, without introducing a magic small constant.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::MtpError;

/// An exact rational `a` plus a first-order symbolic term `b*eps`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Weight {
    a: BigRational,
    b: BigRational,
}

impl Weight {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Weight { a, b }
    }

    /// A plain rational weight with no perturbation.
    pub fn rational(a: BigRational) -> Self {
        Weight {
            a,
            b: BigRational::zero(),
        }
    }

    /// A pure perturbation `b*eps`.
    pub fn epsilon(b: BigRational) -> Self {
        Weight {
            a: BigRational::zero(),
            b,
        }
    }

    pub fn zero() -> Self {
        Weight::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Weight::rational(BigRational::one())
    }

    pub fn from_ints(num: i64, den: i64) -> Self {
        Weight::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The rational part, i.e. the value in the `eps -> 0` limit.
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    /// The coefficient of `eps`.
    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn has_epsilon(&self) -> bool {
        !self.b.is_zero()
    }

    /// Lexicographic comparison against a plain rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        match self.a.cmp(r) {
            Ordering::Equal => self.b.cmp(&BigRational::zero()),
            ord => ord,
        }
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        self.a.cmp(&other.a).then_with(|| self.b.cmp(&other.b))
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        Weight {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        Weight {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Mul for &Weight {
    type Output = Weight;
    fn mul(self, rhs: &Weight) -> Weight {
        Weight {
            a: &self.a * &rhs.a,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

/// Division truncated at first order in `eps`.
///
/// When both operands are pure perturbations the quotient tends to the finite
/// ratio of the `eps` coefficients, so the result is that ratio with the
/// (unknown) first-order part dropped. Dividing a value with a nonzero limit
/// by a pure perturbation has no finite limit and panics; the graph update
/// rule never produces that case on a graph satisfying the regularity
/// conditions.
impl Div for &Weight {
    type Output = Weight;
    fn div(self, rhs: &Weight) -> Weight {
        if !rhs.a.is_zero() {
            let a = &self.a / &rhs.a;
            let b = (&self.b * &rhs.a - &self.a * &rhs.b) / (&rhs.a * &rhs.a);
            Weight { a, b }
        } else if !rhs.b.is_zero() {
            assert!(
                self.a.is_zero(),
                "division of a finite weight by a pure eps term"
            );
            Weight::rational(&self.b / &rhs.b)
        } else {
            panic!("division by zero weight");
        }
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}eps", self.b)
        } else if self.b.is_positive() {
            write!(f, "{}+{}eps", self.a, self.b)
        } else {
            write!(f, "{}{}eps", self.a, self.b)
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parses an exact rational from `"p/q"`, integer, or decimal text.
///
/// Decimals convert exactly (`"0.0031"` is 31/10000) and an optional exponent
/// is honoured, so `"6.5e-6"` is 65/10^7.
pub fn parse_rational(text: &str) -> Result<BigRational, MtpError> {
    let s = text.trim();
    let err = || MtpError::BadNumber(s.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err())?;
        let d: BigInt = den.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{}{}", int_part, frac_part);
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(err());
    }
    let n: BigInt = digits.parse().map_err(|_| err())?;
    let scale = frac_part.len() as i64 - exp;
    let value = if scale >= 0 {
        BigRational::new(n, BigInt::from(10u8).pow(scale as u32))
    } else {
        BigRational::from(n * BigInt::from(10u8).pow((-scale) as u32))
    };
    Ok(value)
}

/// Formats a rational as both an exact fraction and a decimal approximation.
pub fn fraction_and_decimal(r: &BigRational) -> String {
    format!("{} ({:.6})", r, rational_to_f64(r))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Scale down huge operands before the lossy conversion.
    let bits = num.bits().max(den.bits());
    if bits > 500 {
        let shift = bits - 500;
        let n = num >> shift;
        let d = den >> shift;
        n.to_string().parse::<f64>().unwrap_or(f64::NAN)
            / d.to_string().parse::<f64>().unwrap_or(f64::NAN)
    } else {
        num.to_string().parse::<f64>().unwrap_or(f64::NAN)
            / den.to_string().parse::<f64>().unwrap_or(f64::NAN)
    }
}

/// Exact rational equal to the given float.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parse_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), r(3, 4));
        assert_eq!(parse_rational("0.0031").unwrap(), r(31, 10000));
        assert_eq!(parse_rational("6.5e-6").unwrap(), r(65, 10_000_000));
        assert_eq!(parse_rational("1").unwrap(), r(1, 1));
        assert_eq!(parse_rational("8.1e-13").unwrap(), r(81, 100_000_000_000_000));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn lexicographic_order() {
        let w = Weight::new(r(1, 2), r(-1, 3));
        assert!(w < Weight::from_ints(1, 2));
        assert!(w > Weight::from_ints(1, 3));
        assert_eq!(w.cmp_rational(&r(1, 2)), Ordering::Less);
    }

    #[test]
    fn dual_number_rules() {
        let x = Weight::new(r(1, 2), r(1, 1));
        let y = Weight::new(r(1, 3), r(2, 1));
        let prod = &x * &y;
        assert_eq!(prod.a(), &r(1, 6));
        assert_eq!(prod.b(), &(r(1, 2) * r(2, 1) + r(1, 1) * r(1, 3)));
        let quot = &x / &y;
        assert_eq!(quot.a(), &r(3, 2));
    }

    #[test]
    fn pure_eps_ratio_has_finite_limit() {
        // (2t*eps) / (2*eps) -> t
        let num = Weight::epsilon(r(3, 2));
        let den = Weight::epsilon(r(2, 1));
        let q = &num / &den;
        assert_eq!(q, Weight::rational(r(3, 4)));
    }

    #[test]
    #[should_panic]
    fn finite_over_pure_eps_panics() {
        let _ = &Weight::one() / &Weight::epsilon(r(1, 1));
    }
}
