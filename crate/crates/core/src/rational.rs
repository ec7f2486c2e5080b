//! Exact rational scalars and the coefficient-ring abstraction.
//!
//! Everything analytic in this crate is computed over arbitrary-precision
//! rationals; floating point appears only at final evaluation. The [`Scalar`]
//! trait lets the moment/cumulant algebra run unchanged over rationals,
//! doubles, and exp-polynomials.

use std::ops::Sub;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational; always reduced, denominator always positive.
pub type Rational = num_rational::BigRational;

/// Rational from an integer numerator and denominator.
///
/// Panics if `d == 0`; use [`parse_rational`] for untrusted input.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    Rational::from_integer(acc)
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Rational::new(num, den)
}

/// Integer power `r^e` with `e` possibly negative (errors on `0^negative`).
pub fn rational_pow(r: &Rational, e: i32) -> Result<Rational> {
    if r.is_zero() && e < 0 {
        return Err(Error::InvalidArgument(
            "zero cannot be raised to a negative power".into(),
        ));
    }
    Ok(r.pow(e))
}

/// Converts to `f64` with correct magnitude even when numerator and
/// denominator are individually too large for `f64`.
pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    // Keep ~96 significant bits of each side and track the exponent shift;
    // direct ToPrimitive would overflow to inf/inf = NaN on large fractions.
    let shift_n = (r.numer().bits() as i64 - 96).max(0) as u64;
    let shift_d = (r.denom().bits() as i64 - 96).max(0) as u64;
    let n = (r.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
    let scale = shift_n as i64 - shift_d as i64;
    if scale > i32::MAX as i64 || scale < i32::MIN as i64 {
        return if scale > 0 {
            f64::INFINITY * n.signum()
        } else {
            0.0
        };
    }
    (n / d) * 2f64.powi(scale as i32)
}

/// Parses `"a/b"`, integers, and decimal/scientific literals (`"7/3"`, `"-2"`,
/// `"2.5"`, `"1e-3"`) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = |m: &str| Error::InvalidArgument(format!("cannot parse {s:?} as a rational: {m}"));
    if s.is_empty() {
        return Err(bad("empty string"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    // Decimal or scientific literal, evaluated exactly.
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad("bad exponent"))?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if !frac_part.is_empty() && !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("bad fractional part"));
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad("no digits"));
    } else {
        digits
    };
    let m: BigInt = digits.parse().map_err(|_| bad("bad mantissa"))?;
    let ten = int(10);
    let scale = exp - frac_part.len() as i32;
    Ok(Rational::from_integer(m) * ten.pow(scale))
}

/// Coefficient ring for the moment/cumulant algebra.
///
/// Implementations: [`Rational`] (exact analytic path), `f64` (Monte Carlo
/// estimates), and [`crate::exppoly::ExpPoly`] (time-dependent cumulants).
pub trait Scalar: Clone + Zero + One + Sub<Output = Self> {
    fn from_rational(r: &Rational) -> Self;

    /// Scales by an exact rational factor.
    fn scale(&self, r: &Rational) -> Self {
        self.clone() * Self::from_rational(r)
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
}
