//! Separated-set machinery: greedy lower bounds for the maximal size of a
//! family whose members stay pairwise at least eps apart at some time
//! before n, and the derived growth-rate tables.
//!
//! Separation here is the non-strict `d(f^j x, f^j y) >= eps` for some
//! `0 <= j < n` (exact arithmetic makes the boundary case meaningful; see
//! docs/algorithms.md). Greedy selection over a fixed canonical scan order
//! gives a certified lower bound, never a maximum claim.

use crate::dynamics::PairVerdict;
use crate::hyper::{hausdorff, HyperElement, HyperError, InducedMap};
use crate::plmap::{MapError, PLSelfMap};
use crate::scalar::Scalar;
use crate::star::{g_apply, g_subtree, star_distance, star_hausdorff, StarPoint, StarSubtree};
use crate::tree::TreePoint;

/// A discrete-time system with a metric: everything the separated-set
/// machinery needs.
pub trait DynSystem {
    type Point: Clone;
    type Dist: Scalar;
    type Error: std::fmt::Debug;

    fn step(&self, p: &Self::Point) -> Result<Self::Point, Self::Error>;
    fn dist(&self, a: &Self::Point, b: &Self::Point) -> Result<Self::Dist, Self::Error>;
}

/// Point dynamics of a PL self-map.
pub struct PointSystem<'a, S>(pub &'a PLSelfMap<S>);

impl<'a, S: Scalar> DynSystem for PointSystem<'a, S> {
    type Point = TreePoint<S>;
    type Dist = S;
    type Error = MapError;

    fn step(&self, p: &Self::Point) -> Result<Self::Point, MapError> {
        self.0.evaluate(p)
    }

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> Result<S, MapError> {
        Ok(self.0.tree().distance(a, b)?)
    }
}

/// Induced dynamics on a hyperspace.
pub struct HyperSystem<'a, S>(pub InducedMap<'a, S>);

impl<'a, S: Scalar> DynSystem for HyperSystem<'a, S> {
    type Point = HyperElement<S>;
    type Dist = S;
    type Error = HyperError;

    fn step(&self, p: &Self::Point) -> Result<Self::Point, HyperError> {
        self.0.step(p)
    }

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> Result<S, HyperError> {
        hausdorff(self.0.tree(), a, b)
    }
}

/// The star homeomorphism acting on star points.
pub struct StarPointSystem;

impl DynSystem for StarPointSystem {
    type Point = StarPoint;
    type Dist = crate::scalar::Rat;
    type Error = std::convert::Infallible;

    fn step(&self, p: &StarPoint) -> Result<StarPoint, Self::Error> {
        Ok(g_apply(p))
    }

    fn dist(&self, a: &StarPoint, b: &StarPoint) -> Result<Self::Dist, Self::Error> {
        Ok(star_distance(a, b))
    }
}

/// The induced star map acting on star subtrees.
pub struct StarTreeSystem;

impl DynSystem for StarTreeSystem {
    type Point = StarSubtree;
    type Dist = crate::scalar::Rat;
    type Error = std::convert::Infallible;

    fn step(&self, p: &StarSubtree) -> Result<StarSubtree, Self::Error> {
        Ok(g_subtree(p, 1))
    }

    fn dist(&self, a: &StarSubtree, b: &StarSubtree) -> Result<Self::Dist, Self::Error> {
        Ok(star_hausdorff(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepMethod {
    /// Greedy scan in pool order; a certified lower bound.
    GreedyLowerBound,
    /// An explicitly provided family verified pairwise.
    ExactFamily,
}

#[derive(Debug, Clone)]
pub struct SepResult<P, D> {
    pub n: usize,
    pub eps: D,
    pub count: usize,
    pub witnesses: Option<Vec<P>>,
    pub method: SepMethod,
}

fn orbit_prefix<Sys: DynSystem>(
    sys: &Sys,
    p: &Sys::Point,
    n: usize,
) -> Result<Vec<Sys::Point>, Sys::Error> {
    let mut orb = Vec::with_capacity(n);
    let mut x = p.clone();
    for _ in 0..n {
        orb.push(x.clone());
        x = sys.step(&x)?;
    }
    Ok(orb)
}

fn separated<Sys: DynSystem>(
    sys: &Sys,
    a: &[Sys::Point],
    b: &[Sys::Point],
    n: usize,
    eps: &Sys::Dist,
) -> Result<bool, Sys::Error> {
    for j in 0..n.min(a.len()).min(b.len()) {
        if sys.dist(&a[j], &b[j])? >= *eps {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Greedy maximal separated subset of the pool, scanned in pool order.
pub fn sep_lower_bound<Sys: DynSystem>(
    sys: &Sys,
    pool: &[Sys::Point],
    n: usize,
    eps: &Sys::Dist,
    keep_witnesses: bool,
) -> Result<SepResult<Sys::Point, Sys::Dist>, Sys::Error> {
    let mut kept: Vec<Vec<Sys::Point>> = Vec::new();
    for p in pool {
        let orb = orbit_prefix(sys, p, n)?;
        let mut sep_from_all = true;
        for q in &kept {
            if !separated(sys, &orb, q, n, eps)? {
                sep_from_all = false;
                break;
            }
        }
        if sep_from_all {
            kept.push(orb);
        }
    }
    let count = kept.len();
    let witnesses = keep_witnesses.then(|| kept.into_iter().map(|mut o| o.swap_remove(0)).collect());
    Ok(SepResult {
        n,
        eps: eps.clone(),
        count,
        witnesses,
        method: SepMethod::GreedyLowerBound,
    })
}

/// Independent pairwise re-verification of a claimed separated family.
pub fn verify_separated<Sys: DynSystem>(
    sys: &Sys,
    family: &[Sys::Point],
    n: usize,
    eps: &Sys::Dist,
) -> Result<bool, Sys::Error> {
    let orbits: Vec<Vec<Sys::Point>> = family
        .iter()
        .map(|p| orbit_prefix(sys, p, n))
        .collect::<Result<_, _>>()?;
    for i in 0..orbits.len() {
        for j in (i + 1)..orbits.len() {
            if !separated(sys, &orbits[i], &orbits[j], n, eps)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One row of the growth-rate table.
#[derive(Debug, Clone)]
pub struct CurveRow<D> {
    pub n: usize,
    pub eps: D,
    pub count: usize,
    /// (1/n) log count — a lower-bound growth rate, no convergence claim.
    pub rate: f64,
}

pub fn entropy_curve<Sys: DynSystem>(
    sys: &Sys,
    pool: &[Sys::Point],
    n_values: &[usize],
    eps_values: &[Sys::Dist],
) -> Result<Vec<CurveRow<Sys::Dist>>, Sys::Error> {
    let mut rows = Vec::new();
    for &n in n_values {
        for eps in eps_values {
            let res = sep_lower_bound(sys, pool, n, eps, false)?;
            let rate = if n == 0 {
                0.0
            } else {
                (res.count as f64).ln() / n as f64
            };
            rows.push(CurveRow {
                n,
                eps: eps.clone(),
                count: res.count,
                rate,
            });
        }
    }
    Ok(rows)
}

/// Tail-statistics classification of a pair in any system (the hyperspace
/// scans use this through the f64 instantiation).
pub fn pair_tail_verdict<Sys: DynSystem>(
    sys: &Sys,
    x: &Sys::Point,
    y: &Sys::Point,
    eps: &Sys::Dist,
    horizon: usize,
) -> Result<(PairVerdict, Sys::Dist, Sys::Dist), Sys::Error> {
    let start = horizon / 2;
    let mut p = x.clone();
    let mut q = y.clone();
    let mut inf: Option<Sys::Dist> = None;
    let mut sup: Option<Sys::Dist> = None;
    for n in 0..=horizon {
        if n >= start {
            let d = sys.dist(&p, &q)?;
            if inf.as_ref().is_none_or(|v| d < *v) {
                inf = Some(d.clone());
            }
            if sup.as_ref().is_none_or(|v| d > *v) {
                sup = Some(d);
            }
        }
        if n < horizon {
            p = sys.step(&p)?;
            q = sys.step(&q)?;
        }
    }
    let inf = inf.expect("window nonempty");
    let sup = sup.expect("window nonempty");
    let two_eps = eps.clone() * Sys::Dist::from_ratio(2, 1);
    let verdict = if sup < *eps {
        PairVerdict::Asymptotic
    } else if inf >= *eps {
        PairVerdict::DistalEvidence
    } else if sup >= two_eps {
        PairVerdict::LiYorkeEvidence
    } else {
        PairVerdict::Undetermined
    };
    Ok((verdict, inf, sup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::star::t_sigma;
    use crate::testutil::{contraction_map, identity_map, reflection_map, unit_interval};

    #[test]
    fn nothing_separates_below_eps() {
        let t = unit_interval();
        let f = identity_map(&t);
        let sys = PointSystem(&f);
        let pool = vec![
            t.point_on_edge(0, rat(1, 2)).unwrap(),
            t.point_on_edge(0, rat(51, 100)).unwrap(),
        ];
        let res = sep_lower_bound(&sys, &pool, 5, &rat(1, 10), true).unwrap();
        assert_eq!(res.count, 1);
    }

    #[test]
    fn spread_points_all_kept_under_identity() {
        let t = unit_interval();
        let f = identity_map(&t);
        let sys = PointSystem(&f);
        let pool: Vec<_> = (0..=4)
            .map(|k| t.point_on_edge(0, rat(k, 4)).unwrap())
            .collect();
        let res = sep_lower_bound(&sys, &pool, 3, &rat(1, 4), true).unwrap();
        assert_eq!(res.count, 5);
        assert!(verify_separated(&sys, &res.witnesses.unwrap(), 3, &rat(1, 4)).unwrap());
    }

    #[test]
    fn branch_family_reaches_k_pow_n() {
        // Words over {1,2}, length 3: all 8 subtrees separated at 1/2 within
        // the window that includes the n-th iterate.
        let sys = StarTreeSystem;
        let k = 2u64;
        let n = 3usize;
        let mut pool = Vec::new();
        for a in 1..=k {
            for b in 1..=k {
                for c in 1..=k {
                    pool.push(t_sigma(k, &[a, b, c]).unwrap());
                }
            }
        }
        let res = sep_lower_bound(&sys, &pool, n + 1, &rat(1, 2), true).unwrap();
        assert_eq!(res.count, 8);
        assert!(verify_separated(&sys, &res.witnesses.unwrap(), n + 1, &rat(1, 2)).unwrap());
        // Growth per word symbol reaches log k.
        assert!((res.count as f64).ln() / n as f64 >= (k as f64).ln() - 1e-12);
    }

    #[test]
    fn contraction_rates_decay() {
        let t = unit_interval();
        let f = contraction_map(&t);
        let sys = PointSystem(&f);
        let pool: Vec<_> = (0..=10)
            .map(|k| t.point_on_edge(0, rat(k, 10)).unwrap())
            .collect();
        let rows = entropy_curve(&sys, &pool, &[1, 4, 16], &[rat(1, 5)]).unwrap();
        assert!(rows[0].rate >= rows[1].rate && rows[1].rate >= rows[2].rate);
    }

    #[test]
    fn isometry_rate_is_zero_for_large_eps() {
        let t = unit_interval();
        let f = reflection_map(&t);
        let sys = PointSystem(&f);
        let pool: Vec<_> = (0..=10)
            .map(|k| t.point_on_edge(0, rat(k, 10)).unwrap())
            .collect();
        // eps above the pool diameter: nothing separates, count 1, rate 0.
        let rows = entropy_curve(&sys, &pool, &[8], &[rat(2, 1)]).unwrap();
        assert_eq!(rows[0].count, 1);
        assert_eq!(rows[0].rate, 0.0);
    }

    #[test]
    fn rates_antitone_in_eps() {
        let t = unit_interval();
        let f = reflection_map(&t);
        let sys = PointSystem(&f);
        let pool: Vec<_> = (0..=20)
            .map(|k| t.point_on_edge(0, rat(k, 20)).unwrap())
            .collect();
        let rows = entropy_curve(&sys, &pool, &[5], &[rat(1, 20), rat(1, 10), rat(1, 2)]).unwrap();
        assert!(rows[0].count >= rows[1].count && rows[1].count >= rows[2].count);
    }
}
