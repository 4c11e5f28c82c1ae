//! Scalar backends.
//!
//! Every moment-level computation is written once against [`Scalar`] and runs
//! either in exact rational arithmetic (the oracle) or in IEEE floating point.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// Arithmetic interface shared by the exact and floating backends.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and zero tests need no tolerance.
    const EXACT: bool;

    /// Name used in configs and reports.
    const NAME: &'static str;

    /// Rounds (or copies) an exact rational into this backend.
    fn from_rational(q: &BigRational) -> Self;

    /// Converts to `f64`, rounding if necessary.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Rounds to double-double, the working precision of the eigenvalue
    /// iteration.
    fn to_dd(&self) -> DoubleDouble {
        DoubleDouble::from_f64(self.to_f64_lossy())
    }

    /// Zero test: exact comparison for rationals, `|self| <= rel * scale` for floats.
    fn negligible(&self, scale: f64, rel: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            let v = self.to_f64_lossy().abs();
            !(v > rel * scale)
        }
    }

    /// Determinant by elimination. Overridden by the rational backend with a
    /// fraction-free variant.
    fn determinant(m: &[Vec<Self>]) -> Self {
        crate::linalg::det_by_elimination(m)
    }

    /// Rank of a matrix. `rel_tol` is ignored by exact backends.
    fn rank(m: &[Vec<Self>], rel_tol: f64) -> usize {
        crate::linalg::rank_by_elimination(m, rel_tol)
    }

    /// JSON encoding: rationals as `"p/q"` strings, floats as numbers.
    fn to_json(&self) -> serde_json::Value;

    fn int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("integer conversion")
    }
}

/// Exact rationals with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float64";

    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    const NAME: &'static str = "float32";

    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q) as f32
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(f64::from(*self))
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_dd(&self) -> DoubleDouble {
        DoubleDouble::from_rational(self)
    }

    fn determinant(m: &[Vec<Self>]) -> Self {
        crate::linalg::bareiss_det(m)
    }

    fn rank(m: &[Vec<Self>], _rel_tol: f64) -> usize {
        crate::linalg::bareiss_rank(m)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

impl Scalar for DoubleDouble {
    const EXACT: bool = false;
    const NAME: &'static str = "double-double";

    fn from_rational(q: &BigRational) -> Self {
        let hi = rational_to_f64(q);
        match BigRational::from_float(hi) {
            Some(h) => DoubleDouble::from_parts(hi, rational_to_f64(&(q - h))),
            None => DoubleDouble::from_f64(hi),
        }
    }

    fn to_f64_lossy(&self) -> f64 {
        self.hi() + self.lo()
    }

    fn to_dd(&self) -> DoubleDouble {
        *self
    }

    fn to_json(&self) -> serde_json::Value {
        self.to_f64_lossy().to_json()
    }
}

/// Correctly rounded for moderate sizes; falls back to a scaled division
/// when numerator or denominator overflow `f64`.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let (n, d) = (q.numer(), q.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact rational value of a finite `f64`.
pub fn f64_to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite number {x}")))
}

/// Parses `"p/q"`, an integer, or a decimal literal such as `"0.125"` or
/// `"1e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("{s:?}: zero denominator")));
        }
        return Ok(BigRational::new(p, q));
    }
    parse_decimal(s).ok_or_else(|| Error::Parse(format!("cannot parse {s:?} as a rational")))
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= pow;
    } else {
        value /= pow;
    }
    Some(if negative { -value } else { value })
}

/// `p/q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `q^k` for rationals, including `0^0 = 1`.
pub fn rational_pow(q: &BigRational, k: usize) -> BigRational {
    if k == 0 {
        return BigRational::one();
    }
    num_traits::pow(q.clone(), k)
}
