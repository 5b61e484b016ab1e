//! Scalar abstraction over the number type used by the geometry.
//!
//! All core operations are generic over [`Scalar`]. The [`Rat`] instantiation
//! (arbitrary-precision rationals) carries every exact decision: equality of
//! points, monotonicity verdicts, periodic-point solving, Hausdorff distances.
//! The `f64` instantiation is for long-horizon orbit statistics where the
//! result is evidence, not a proof.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};
use std::fmt;

/// Exact rational scalar.
pub type Rat = BigRational;

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// True when equality and ordering are exact rather than rounded.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rat(r: &Rat) -> Self;
    fn approx(&self) -> f64;
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn approx(&self) -> f64 {
        rat_to_f64(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r)
    }

    fn approx(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r) as f32
    }

    fn approx(&self) -> f64 {
        *self as f64
    }
}

/// Shorthand rational constructor.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Rational to f64, robust against numerator/denominator exceeding f64 range
/// while the value itself is moderate (common after long orbit iterations).
pub fn rat_to_f64(r: &Rat) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let numer = r.numer();
    let denom = r.denom();
    let shift = numer.bits().max(denom.bits()).saturating_sub(512);
    let n = numer >> shift;
    let d = denom >> shift;
    if d.sign() == num_bigint::Sign::NoSign {
        return if n.sign() == num_bigint::Sign::Minus {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0)
}

#[derive(Debug, thiserror::Error)]
#[error("malformed rational {input:?}: {reason}")]
pub struct ParseRatError {
    pub input: String,
    pub reason: String,
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = |reason: &str| ParseRatError {
        input: s.to_owned(),
        reason: reason.to_owned(),
    };
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| err("bad denominator"))?,
        None => BigInt::from(1),
    };
    if d == BigInt::from(0) {
        return Err(err("zero denominator"));
    }
    Ok(Rat::new(n, d))
}

/// Canonical `"p/q"` form (denominator always explicit).
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7/2", "5", "0", "-12"] {
            let r = parse_rat(s).unwrap();
            let back = parse_rat(&format_rat(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(format_rat(&rat(3, 4)), "3/4");
        assert_eq!(format_rat(&rat(5, 1)), "5/1");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x/2").is_err());
    }

    #[test]
    fn huge_rational_to_f64_is_finite() {
        let big = BigInt::from(3).pow(3000);
        let r = Rat::new(&big * 2, big);
        assert!((rat_to_f64(&r) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_construction_agrees() {
        let q = <Rat as Scalar>::from_ratio(7, 3);
        let f = <f64 as Scalar>::from_ratio(7, 3);
        assert!((q.approx() - f).abs() < 1e-15);
    }
}
