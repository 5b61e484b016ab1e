//! Adding machines (odometers): +1 with carry on bounded digit sequences.
//!
//! The infinite odometer is modeled by its depth-N truncation; carries past
//! depth N are discarded, so two points agreeing on all N digits are the
//! same state and every certificate states its depth. The digit metric is
//! `sum of delta(x_i, y_i) / 2^i`, a dyadic rational.
//!
//! Minimality at truncation (every orbit visits each truncated state once
//! per full cycle) is equivalent to the machine being a single cycle from
//! zero, which [`verify_single_cycle`] checks; the return-distance
//! certificates pair with it.

use crate::scalar::{rat, Rat};
use num_traits::Zero;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum OdoError {
    #[error("digit bounds must all be at least 2 (found {0})")]
    BadBound(u64),
    #[error("base must have at least one digit")]
    EmptyBase,
    #[error("digit {digit} at position {pos} exceeds its bound {bound}")]
    DigitOutOfRange { pos: usize, digit: u64, bound: u64 },
    #[error("point has {got} digits, base has depth {want}")]
    WrongLength { got: usize, want: usize },
    #[error("points belong to different bases")]
    BaseMismatch,
    #[error("depth {got} exceeds base depth {want}")]
    DepthOutOfRange { got: usize, want: usize },
    #[error("cycle enumeration of {0} states exceeds the budget")]
    CycleBudget(u128),
}

/// Digit bounds `j_1..j_N`, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Base {
    bounds: Vec<u64>,
}

impl Base {
    pub fn new(bounds: Vec<u64>) -> Result<Self, OdoError> {
        if bounds.is_empty() {
            return Err(OdoError::EmptyBase);
        }
        for &b in &bounds {
            if b < 2 {
                return Err(OdoError::BadBound(b));
            }
        }
        Ok(Base { bounds })
    }

    /// Uniform base, e.g. `(2, 2, ..., 2)` at the given depth.
    pub fn uniform(bound: u64, depth: usize) -> Result<Self, OdoError> {
        if depth == 0 {
            return Err(OdoError::EmptyBase);
        }
        Base::new(vec![bound; depth])
    }

    /// Repeats the given pattern cyclically out to `depth` digits.
    pub fn cyclic(pattern: &[u64], depth: usize) -> Result<Self, OdoError> {
        if pattern.is_empty() || depth == 0 {
            return Err(OdoError::EmptyBase);
        }
        Base::new((0..depth).map(|i| pattern[i % pattern.len()]).collect())
    }

    pub fn depth(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[u64] {
        &self.bounds
    }

    /// Number of truncated states, `j_1 * ... * j_N`.
    pub fn state_count(&self) -> u128 {
        self.bounds.iter().map(|&b| b as u128).product()
    }

    /// Partial product `j_1 * ... * j_m`.
    pub fn partial_period(&self, m: usize) -> u128 {
        self.bounds[..m].iter().map(|&b| b as u128).product()
    }

    pub fn zero(&self) -> OdoPoint {
        OdoPoint {
            digits: vec![0; self.depth()],
        }
    }

    pub fn point(&self, digits: Vec<u64>) -> Result<OdoPoint, OdoError> {
        if digits.len() != self.depth() {
            return Err(OdoError::WrongLength {
                got: digits.len(),
                want: self.depth(),
            });
        }
        for (pos, (&d, &b)) in digits.iter().zip(&self.bounds).enumerate() {
            if d >= b {
                return Err(OdoError::DigitOutOfRange {
                    pos,
                    digit: d,
                    bound: b,
                });
            }
        }
        Ok(OdoPoint { digits })
    }

    fn check(&self, x: &OdoPoint) -> Result<(), OdoError> {
        if x.digits.len() != self.depth() {
            return Err(OdoError::BaseMismatch);
        }
        Ok(())
    }
}

/// A truncated odometer state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OdoPoint {
    digits: Vec<u64>,
}

impl OdoPoint {
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }
}

/// The adding machine map: add one with carry; the final carry is discarded
/// by the truncation.
pub fn add_one(base: &Base, x: &OdoPoint) -> Result<OdoPoint, OdoError> {
    base.check(x)?;
    let mut digits = x.digits.clone();
    for (d, &b) in digits.iter_mut().zip(base.bounds()) {
        if *d + 1 < b {
            *d += 1;
            return Ok(OdoPoint { digits });
        }
        *d = 0;
    }
    Ok(OdoPoint { digits })
}

/// `f^k(x)`: adds `k` in mixed radix with carries, in one pass.
pub fn add_k(base: &Base, x: &OdoPoint, k: u128) -> Result<OdoPoint, OdoError> {
    base.check(x)?;
    let mut digits = x.digits.clone();
    let mut carry = k;
    for (d, &b) in digits.iter_mut().zip(base.bounds()) {
        if carry == 0 {
            break;
        }
        let total = *d as u128 + carry;
        *d = (total % b as u128) as u64;
        carry = total / b as u128;
    }
    Ok(OdoPoint { digits })
}

/// The digit metric: `sum of [x_i != y_i] / 2^i`, truncated at the depth.
pub fn d_alpha(base: &Base, x: &OdoPoint, y: &OdoPoint) -> Result<Rat, OdoError> {
    base.check(x)?;
    base.check(y)?;
    let mut acc = Rat::zero();
    let mut weight = rat(1, 2);
    for (a, b) in x.digits.iter().zip(&y.digits) {
        if a != b {
            acc += weight.clone();
        }
        weight /= rat(2, 1);
    }
    Ok(acc)
}

/// Regular-recurrence certificate at digit depth `m`: with period
/// `P_m = j_1 ... j_m`, every return `f^(k P_m)(x)` stays within `2^-m` of
/// `x`; optionally also verifies the truncated machine is a single cycle
/// visiting every state once.
#[derive(Debug, Clone)]
pub struct RrOdoCertificate {
    pub depth: usize,
    pub period: u128,
    pub returns_checked: u128,
    pub max_distance: Rat,
    pub bound: Rat,
    /// True when every digit bound is prime (the conjugacy-form hypothesis).
    pub prime_base: bool,
}

pub fn regular_recurrence_certificate(
    base: &Base,
    x: &OdoPoint,
    m: usize,
) -> Result<RrOdoCertificate, OdoError> {
    if m > base.depth() {
        return Err(OdoError::DepthOutOfRange {
            got: m,
            want: base.depth(),
        });
    }
    base.check(x)?;
    let period = if m == 0 { 1 } else { base.partial_period(m) };
    let full = base.state_count();
    let returns = full / period;
    let bound = pow2_inv(m);
    let mut worst = Rat::zero();
    let mut y = x.clone();
    for _ in 0..returns {
        y = add_k(base, &y, period)?;
        let d = d_alpha(base, x, &y)?;
        if d > bound {
            // Unreachable by the metric structure; kept as a hard check.
            return Ok(RrOdoCertificate {
                depth: m,
                period,
                returns_checked: 0,
                max_distance: d,
                bound,
                prime_base: base_is_prime(base),
            });
        }
        if d > worst {
            worst = d;
        }
    }
    Ok(RrOdoCertificate {
        depth: m,
        period,
        returns_checked: returns,
        max_distance: worst,
        bound,
        prime_base: base_is_prime(base),
    })
}

/// 2^-m as an exact rational.
pub fn pow2_inv(m: usize) -> Rat {
    let mut r = rat(1, 1);
    for _ in 0..m {
        r /= rat(2, 1);
    }
    r
}

fn base_is_prime(base: &Base) -> bool {
    base.bounds().iter().all(|&b| is_prime(b))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Verifies that repeated `add_one` from zero is a single cycle visiting
/// every truncated state exactly once (minimality at truncation).
pub fn verify_single_cycle(base: &Base, budget: u128) -> Result<bool, OdoError> {
    let full = base.state_count();
    if full > budget {
        return Err(OdoError::CycleBudget(full));
    }
    let zero = base.zero();
    let mut seen = std::collections::HashSet::with_capacity(full as usize);
    let mut y = zero.clone();
    for _ in 0..full {
        if !seen.insert(y.clone()) {
            return Ok(false);
        }
        y = add_one(base, &y)?;
    }
    Ok(y == zero && seen.len() as u128 == full)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_one_without_carry() {
        let b = Base::uniform(2, 3).unwrap();
        let x = b.point(vec![0, 0, 0]).unwrap();
        assert_eq!(add_one(&b, &x).unwrap().digits(), &[1, 0, 0]);
    }

    #[test]
    fn add_one_discards_final_carry() {
        let b = Base::new(vec![2, 3]).unwrap();
        let x = b.point(vec![1, 2]).unwrap();
        assert_eq!(add_one(&b, &x).unwrap().digits(), &[0, 0]);
    }

    #[test]
    fn add_one_double_carry() {
        let b = Base::uniform(2, 3).unwrap();
        let x = b.point(vec![1, 1, 0]).unwrap();
        assert_eq!(add_one(&b, &x).unwrap().digits(), &[0, 0, 1]);
    }

    #[test]
    fn metric_examples() {
        let b = Base::uniform(3, 2).unwrap();
        let x = b.point(vec![0, 0]).unwrap();
        assert_eq!(d_alpha(&b, &x, &x).unwrap(), rat(0, 1));
        let y = b.point(vec![1, 0]).unwrap();
        assert_eq!(d_alpha(&b, &x, &y).unwrap(), rat(1, 2));
        let u = b.point(vec![0, 1]).unwrap();
        let v = b.point(vec![0, 2]).unwrap();
        assert_eq!(d_alpha(&b, &u, &v).unwrap(), rat(1, 4));
    }

    #[test]
    fn add_k_matches_repeated_add_one() {
        let b = Base::new(vec![2, 3, 2, 5]).unwrap();
        let mut y = b.zero();
        for k in 0..=(b.state_count() as usize) {
            assert_eq!(add_k(&b, &b.zero(), k as u128).unwrap(), y);
            y = add_one(&b, &y).unwrap();
        }
    }

    #[test]
    fn single_full_cycle() {
        let b = Base::new(vec![2, 3, 2]).unwrap();
        assert!(verify_single_cycle(&b, 1 << 20).unwrap());
    }

    #[test]
    fn rr_certificate_on_two_two_base() {
        let b = Base::uniform(2, 2).unwrap();
        let x = b.zero();
        // Depth 1: period 2, distances bounded by 1/2 over the full cycle.
        let cert = regular_recurrence_certificate(&b, &x, 1).unwrap();
        assert_eq!(cert.period, 2);
        assert_eq!(cert.returns_checked, 2);
        assert!(cert.max_distance <= rat(1, 2));
        assert!(cert.prime_base);
        // Depth 0 is the trivial bound 1.
        let cert0 = regular_recurrence_certificate(&b, &x, 0).unwrap();
        assert_eq!(cert0.bound, rat(1, 1));
        assert!(cert0.max_distance <= cert0.bound);
    }

    #[test]
    fn full_cycle_returns_exactly_depth_ten() {
        let b = Base::uniform(2, 10).unwrap();
        let x = b.point(vec![1, 0, 1, 1, 0, 0, 1, 0, 1, 1]).unwrap();
        assert_eq!(add_k(&b, &x, 1024).unwrap(), x);
        let cert = regular_recurrence_certificate(&b, &x, 10).unwrap();
        assert_eq!(cert.period, 1024);
        assert_eq!(cert.max_distance, rat(0, 1));
    }

    #[test]
    fn non_prime_base_is_flagged() {
        let b = Base::new(vec![4, 2]).unwrap();
        let cert = regular_recurrence_certificate(&b, &b.zero(), 1).unwrap();
        assert!(!cert.prime_base);
    }

    #[test]
    fn invalid_inputs_error() {
        assert!(matches!(Base::new(vec![]), Err(OdoError::EmptyBase)));
        assert!(matches!(Base::new(vec![2, 1]), Err(OdoError::BadBound(1))));
        let b = Base::uniform(2, 2).unwrap();
        assert!(matches!(
            b.point(vec![0, 2]),
            Err(OdoError::DigitOutOfRange { .. })
        ));
        let other = Base::uniform(2, 3).unwrap();
        assert!(matches!(
            d_alpha(&b, &b.zero(), &other.zero()),
            Err(OdoError::BaseMismatch)
        ));
    }
}
