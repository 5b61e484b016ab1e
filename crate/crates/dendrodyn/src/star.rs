//! The infinite star dendrite: countably many rays glued at the root, ray
//! `n` carrying radii `[0, 1/(|n|+1)]`, with the homeomorphism that shifts
//! every ray one step to the right while rescaling radii exactly.
//!
//! Everything here is exact rational arithmetic in the geodesic star metric
//! (same ray: radius difference; different rays: through the root). The
//! planar chordal metric is available as an f64 helper for cross-checks; it
//! never exceeds the geodesic one, and on distances to the root and on
//! shared-ray separations the two coincide.

use crate::scalar::{rat, rat_to_f64, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum StarError {
    #[error("radius {radius} exceeds the bound of ray {ray}")]
    RadiusOutOfRange { ray: i64, radius: Rat },
    #[error("radius must be nonnegative, got {0}")]
    NegativeRadius(Rat),
    #[error("lambda must lie in (0, 1], got {0}")]
    BadLambda(Rat),
    #[error("need 0 < lambda < lambda_prime <= 1")]
    BadLambdaPair,
    #[error("alpha {0} lies outside the certified band")]
    AlphaOutsideBand(Rat),
    #[error("parameter {name} must be at least {min}")]
    TooSmall { name: &'static str, min: u64 },
    #[error("enumeration needs {pairs} pairs, budget is {budget}")]
    BudgetExceeded { pairs: u128, budget: u128 },
    #[error("no witness iterate found for alpha {alpha} at tolerance {tolerance}")]
    NoWitness { alpha: Rat, tolerance: Rat },
}

/// 1/(|n|+1): the radius bound of ray `n`.
pub fn ray_bound(ray: i64) -> Rat {
    rat(1, ray.unsigned_abs() as i64 + 1)
}

/// A point of the star: `ray` and exact radius within the ray bound. Radius
/// zero is the root and is canonicalized to ray 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StarPoint {
    ray: i64,
    radius: Rat,
}

impl StarPoint {
    pub fn new(ray: i64, radius: Rat) -> Result<Self, StarError> {
        if radius.is_negative() {
            return Err(StarError::NegativeRadius(radius));
        }
        if radius > ray_bound(ray) {
            return Err(StarError::RadiusOutOfRange { ray, radius });
        }
        if radius.is_zero() {
            return Ok(StarPoint {
                ray: 0,
                radius: Rat::zero(),
            });
        }
        Ok(StarPoint { ray, radius })
    }

    pub fn root() -> Self {
        StarPoint {
            ray: 0,
            radius: Rat::zero(),
        }
    }

    pub fn is_root(&self) -> bool {
        self.radius.is_zero()
    }

    pub fn ray(&self) -> i64 {
        self.ray
    }

    pub fn radius(&self) -> &Rat {
        &self.radius
    }
}

/// Exact radius scale of the m-step ray shift from `ray` to `ray + m`:
/// the per-step factors telescope to `(|ray|+1) / (|ray+m|+1)`.
pub fn shift_scale(ray: i64, m: i64) -> Rat {
    Rat::new(
        (ray.unsigned_abs() as i64 + 1).into(),
        ((ray + m).unsigned_abs() as i64 + 1).into(),
    )
}

/// The ray-shift homeomorphism: ray n to ray n+1, radius rescaled so ray
/// endpoints map to ray endpoints; the root is the unique fixed point.
pub fn g_apply(p: &StarPoint) -> StarPoint {
    g_pow(p, 1)
}

pub fn g_inverse(p: &StarPoint) -> StarPoint {
    g_pow(p, -1)
}

/// `g^m` in one exact step.
pub fn g_pow(p: &StarPoint, m: i64) -> StarPoint {
    if p.is_root() {
        return StarPoint::root();
    }
    let ray = p.ray + m;
    let radius = p.radius.clone() * shift_scale(p.ray, m);
    StarPoint { ray, radius }
}

/// Geodesic star distance.
pub fn star_distance(p: &StarPoint, q: &StarPoint) -> Rat {
    if p.is_root() {
        return q.radius.clone();
    }
    if q.is_root() {
        return p.radius.clone();
    }
    if p.ray == q.ray {
        (p.radius.clone() - q.radius.clone()).abs()
    } else {
        p.radius.clone() + q.radius.clone()
    }
}

/// Planar chordal distance (f64 helper for cross-checks).
pub fn chordal_distance_f64(p: &StarPoint, q: &StarPoint) -> f64 {
    let place = |s: &StarPoint| {
        let theta = ray_angle(s.ray);
        let r = rat_to_f64(&s.radius);
        (r * theta.cos(), r * theta.sin())
    };
    let (x1, y1) = place(p);
    let (x2, y2) = place(q);
    ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt()
}

/// Planar angle of a ray: rays 0, -1, -2, ... sweep down from pi/2 toward 0;
/// rays 1, 2, ... mirror toward pi.
pub fn ray_angle(ray: i64) -> f64 {
    let n = ray.unsigned_abs() as f64;
    if ray <= 0 {
        std::f64::consts::PI / (n + 2.0)
    } else {
        std::f64::consts::PI - std::f64::consts::PI / (n + 2.0)
    }
}

/// A subcontinuum of the star touching finitely many rays: per-ray reach
/// from the root (positive entries only; the root always belongs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSubtree {
    reach: BTreeMap<i64, Rat>,
}

impl StarSubtree {
    pub fn root_only() -> Self {
        StarSubtree {
            reach: BTreeMap::new(),
        }
    }

    pub fn from_reaches(entries: impl IntoIterator<Item = (i64, Rat)>) -> Result<Self, StarError> {
        let mut reach = BTreeMap::new();
        for (ray, r) in entries {
            if r.is_negative() {
                return Err(StarError::NegativeRadius(r));
            }
            if r > ray_bound(ray) {
                return Err(StarError::RadiusOutOfRange { ray, radius: r });
            }
            if r.is_zero() {
                continue;
            }
            let cur = reach.entry(ray).or_insert_with(Rat::zero);
            if r > *cur {
                *cur = r;
            }
        }
        Ok(StarSubtree { reach })
    }

    /// The segment `[0, alpha]` on the central ray.
    pub fn central_segment(alpha: Rat) -> Result<Self, StarError> {
        StarSubtree::from_reaches([(0, alpha)])
    }

    pub fn reach(&self, ray: i64) -> Rat {
        self.reach.get(&ray).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn reaches(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.reach.iter()
    }

    pub fn ray_count(&self) -> usize {
        self.reach.len()
    }

    /// Largest tip radius = Hausdorff distance to the root.
    pub fn max_reach(&self) -> Rat {
        self.reach
            .values()
            .cloned()
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn contains(&self, p: &StarPoint) -> bool {
        p.is_root() || p.radius <= self.reach(p.ray)
    }
}

/// Image of a star subtree under `g^m` (rays shift, radii rescale).
pub fn g_subtree(t: &StarSubtree, m: i64) -> StarSubtree {
    let reach = t
        .reach
        .iter()
        .map(|(&ray, r)| (ray + m, r.clone() * shift_scale(ray, m)))
        .collect();
    StarSubtree { reach }
}

/// Exact Hausdorff distance between star subtrees: both contain the root,
/// and along a shared ray the directed distance is the reach difference, so
/// d_H is the max over rays of |reach_A - reach_B|.
pub fn star_hausdorff(a: &StarSubtree, b: &StarSubtree) -> Rat {
    let mut worst = Rat::zero();
    for (&ray, ra) in &a.reach {
        let d = (ra.clone() - b.reach(ray)).abs();
        if d > worst {
            worst = d;
        }
    }
    for (&ray, rb) in &b.reach {
        let d = (rb.clone() - a.reach(ray)).abs();
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Uniform continuity modulus for arcs in the geodesic star metric.
pub fn star_modulus_delta(eps: &Rat) -> Result<Rat, StarError> {
    if !eps.is_positive() {
        return Err(StarError::TooSmall {
            name: "eps numerator",
            min: 1,
        });
    }
    Ok(eps.clone() / rat(2, 1))
}

/// Base-2 van der Corput sequence: the dense-in-`[0,1]` driver of the
/// scrambled family (deterministic and exactly rational).
pub fn van_der_corput(n: u64) -> Rat {
    let mut num: i64 = 0;
    let mut den: i64 = 1;
    let mut k = n;
    while k > 0 {
        num = num * 2 + (k & 1) as i64;
        den *= 2;
        k >>= 1;
    }
    rat(num, den)
}

/// `h_lambda(t) = lambda t / 2 + lambda / 2`, mapping `[0,1]` onto
/// `[lambda/2, lambda]`.
pub fn h_lambda(lambda: &Rat, t: &Rat) -> Rat {
    lambda.clone() * t.clone() / rat(2, 1) + lambda.clone() / rat(2, 1)
}

/// `a_lambda(n)`: the dense sequence pushed into [lambda/2, lambda].
pub fn a_lambda(lambda: &Rat, n: u64) -> Rat {
    h_lambda(lambda, &van_der_corput(n))
}

/// Parameters of the scrambled-family construction.
#[derive(Debug, Clone)]
pub struct StarParams {
    pub lambda: Rat,
    pub n_rays: u64,
}

impl StarParams {
    pub fn new(lambda: Rat, n_rays: u64) -> Result<Self, StarError> {
        if !lambda.is_positive() || lambda > Rat::one() {
            return Err(StarError::BadLambda(lambda));
        }
        if n_rays == 0 {
            return Err(StarError::TooSmall {
                name: "n_rays",
                min: 1,
            });
        }
        Ok(StarParams { lambda, n_rays })
    }
}

/// Truncated scrambled-family member: for n = 1..n_rays, ray `-2^n` carries
/// the segment of reach `a_lambda(n) / (2^n + 1)`.
#[derive(Debug, Clone)]
pub struct SLambda {
    pub subtree: StarSubtree,
    /// Hausdorff error of the truncation: the radius bound of the first
    /// omitted ray family, `1/(2^n_rays + 1)`.
    pub truncation_slack: Rat,
}

pub fn build_s_lambda(params: &StarParams) -> Result<SLambda, StarError> {
    if params.n_rays > 40 {
        return Err(StarError::BudgetExceeded {
            pairs: params.n_rays as u128,
            budget: 40,
        });
    }
    let mut entries = Vec::new();
    for n in 1..=params.n_rays {
        let ray = -(2i64.pow(n as u32));
        let reach = a_lambda(&params.lambda, n) / rat(2i64.pow(n as u32) + 1, 1);
        entries.push((ray, reach));
    }
    let slack = rat(1, 2i64.checked_pow(params.n_rays as u32).expect("n_rays fits") + 1);
    Ok(SLambda {
        subtree: StarSubtree::from_reaches(entries)?,
        truncation_slack: slack,
    })
}

/// Witness that one iterate of the scrambled member lands near the target
/// central segment, with the exact approximation bound verified.
#[derive(Debug, Clone)]
pub struct ChaosWitness {
    pub alpha: Rat,
    /// Witness exponent: the iterate is `g^(2^m)`.
    pub m: u64,
    pub distance: Rat,
    pub bound: Rat,
}

/// Per-alpha record of the scrambled-set certificate.
#[derive(Debug, Clone)]
pub struct AlphaRecord {
    pub witness: ChaosWitness,
    /// Exact positive lower bound on the distance from K_alpha to every
    /// iterate of the smaller member's orbit (uniform over all iterates).
    pub separation_lower_bound: Rat,
    /// Min over scanned iterates of d_H(K_alpha, g^m(S_lambda)).
    pub min_distance_to_small_orbit: Rat,
    /// Min over m in 1..=horizon of d_H(K_alpha, g^m(K_alpha)); positive
    /// means no periodicity up to the horizon.
    pub min_self_return: Rat,
}

/// Full ω-chaos certificate for a pair lambda < lambda_prime.
#[derive(Debug, Clone)]
pub struct ChaosCertificate {
    pub lambda: Rat,
    pub lambda_prime: Rat,
    /// For n = 2..: the larger of the two exact distances
    /// d_H(g^(2^n + 2^(n-1))(S), root) over both scrambled members, paired
    /// with the claimed bound 1/(2^(n-1)+1) — the shared ω-limit member.
    pub root_attraction: Vec<(u64, Rat, Rat)>,
    pub truncation_slack: Rat,
    pub alphas: Vec<AlphaRecord>,
}

/// Certifies the three scrambled-set conditions on a sampled alpha band:
/// shared root limit, approximation witnesses with their exact bounds, a
/// positive separation from the smaller member's orbit, and non-periodicity
/// of the targets.
#[allow(clippy::too_many_arguments)]
pub fn omega_chaos_certificate(
    lambda: &Rat,
    lambda_prime: &Rat,
    alphas: &[Rat],
    tolerance: &Rat,
    depth: u64,
    horizon: u64,
    n_rays: u64,
) -> Result<ChaosCertificate, StarError> {
    if !lambda.is_positive() || lambda >= lambda_prime || *lambda_prime > Rat::one() {
        return Err(StarError::BadLambdaPair);
    }
    if depth > 40 || n_rays > 40 {
        return Err(StarError::BudgetExceeded {
            pairs: depth.max(n_rays) as u128,
            budget: 40,
        });
    }
    let params_small = StarParams::new(lambda.clone(), n_rays)?;
    let params_big = StarParams::new(lambda_prime.clone(), n_rays)?;
    let small = build_s_lambda(&params_small)?;
    let big = build_s_lambda(&params_big)?;
    let root = StarSubtree::root_only();

    // Shared ω-limit member: the root attracts the iterates
    // g^(2^n + 2^(n-1)) of both members; record the worse of the two
    // distances against the common bound.
    let mut root_attraction = Vec::new();
    for n in 2..=depth.min(n_rays) {
        let m = (1u64 << n) + (1u64 << (n - 1));
        let d_small = star_hausdorff(&g_subtree(&small.subtree, m as i64), &root);
        let d_big = star_hausdorff(&g_subtree(&big.subtree, m as i64), &root);
        let bound = rat(1, (1i64 << (n - 1)) + 1);
        root_attraction.push((n, d_small.max(d_big), bound));
    }

    let mut records = Vec::new();
    for alpha in alphas {
        if *alpha <= *lambda || *alpha > *lambda_prime {
            return Err(StarError::AlphaOutsideBand(alpha.clone()));
        }
        let k_alpha = StarSubtree::central_segment(alpha.clone())?;
        // Witness iterate: first m whose approximation bound drops under the
        // tolerance; the bound is max(tail-ray radius cap, central-ray miss).
        let mut witness = None;
        for m in 1..=depth {
            let tail = rat(1, (1i64 << (m - 1)) + 1);
            let miss = (a_lambda(lambda_prime, m) - alpha.clone()).abs();
            let bound = if tail > miss { tail } else { miss };
            if bound <= *tolerance {
                let iterate = g_subtree(&big.subtree, 1i64 << m);
                let d = star_hausdorff(&k_alpha, &iterate);
                if d > bound {
                    // The bound holds identically for this construction;
                    // a violation means an implementation bug.
                    return Err(StarError::NoWitness {
                        alpha: alpha.clone(),
                        tolerance: tolerance.clone(),
                    });
                }
                witness = Some(ChaosWitness {
                    alpha: alpha.clone(),
                    m,
                    distance: d,
                    bound,
                });
                break;
            }
        }
        let witness = witness.ok_or_else(|| StarError::NoWitness {
            alpha: alpha.clone(),
            tolerance: tolerance.clone(),
        })?;
        // Separation from the smaller member's orbit: the central-ray reach
        // of g^m(S_lambda) never exceeds lambda < alpha, and only the tip of
        // K_alpha matters, so alpha - lambda is a uniform lower bound.
        let separation_lower_bound = alpha.clone() - lambda.clone();
        let mut min_distance = None;
        for m in 0..=horizon {
            let d = star_hausdorff(&k_alpha, &g_subtree(&small.subtree, m as i64));
            if min_distance.as_ref().is_none_or(|b| d < *b) {
                min_distance = Some(d);
            }
        }
        let min_distance_to_small_orbit = min_distance.expect("horizon scan nonempty");
        debug_assert!(min_distance_to_small_orbit >= separation_lower_bound);
        // Non-periodicity of K_alpha under the induced map.
        let mut min_self = None;
        for m in 1..=horizon {
            let d = star_hausdorff(&k_alpha, &g_subtree(&k_alpha, m as i64));
            if min_self.as_ref().is_none_or(|b| d < *b) {
                min_self = Some(d);
            }
        }
        records.push(AlphaRecord {
            witness,
            separation_lower_bound,
            min_distance_to_small_orbit,
            min_self_return: min_self.expect("horizon at least 1"),
        });
    }
    Ok(ChaosCertificate {
        lambda: lambda.clone(),
        lambda_prime: lambda_prime.clone(),
        root_attraction,
        truncation_slack: big.truncation_slack.clone().max(small.truncation_slack),
        alphas: records,
    })
}

/// The branch family used for the entropy bound: for a word sigma in
/// {1..k}^n, rays -1..-n carry reaches sigma_j / (k (j+1)).
pub fn t_sigma(k: u64, sigma: &[u64]) -> Result<StarSubtree, StarError> {
    let mut entries = Vec::new();
    for (idx, &s) in sigma.iter().enumerate() {
        let j = (idx + 1) as i64;
        entries.push((-j, rat(s as i64, k as i64 * (j + 1))));
    }
    StarSubtree::from_reaches(entries)
}

/// Separated-family certificate: all k^n branch subtrees are pairwise
/// (n+1)-step separated at exactly 1/k under the induced map.
#[derive(Debug, Clone)]
pub struct EntropyCertificate {
    pub k: u64,
    pub n: u64,
    pub family_size: u128,
    pub pairs_checked: u128,
    /// Min over pairs of the max over iterates of d_H (>= 1/k when valid).
    pub min_separation: Rat,
    /// log(k): the certified per-step growth-rate bound.
    pub rate_bound_nats: f64,
}

pub fn entropy_certificate(k: u64, n: u64, pair_budget: u128) -> Result<EntropyCertificate, StarError> {
    if k < 1 {
        return Err(StarError::TooSmall { name: "k", min: 1 });
    }
    if n < 1 {
        return Err(StarError::TooSmall { name: "n", min: 1 });
    }
    let family_size = (k as u128).pow(n as u32);
    let pairs = family_size * (family_size - 1) / 2;
    if pairs > pair_budget {
        return Err(StarError::BudgetExceeded {
            pairs,
            budget: pair_budget,
        });
    }
    // Enumerate words and precompute every iterate of every subtree.
    let words: Vec<Vec<u64>> = enumerate_words(k, n as usize);
    let mut iterates: Vec<Vec<StarSubtree>> = Vec::with_capacity(words.len());
    for w in &words {
        let t = t_sigma(k, w)?;
        let mut row = Vec::with_capacity(n as usize + 1);
        for j in 0..=n {
            row.push(g_subtree(&t, j as i64));
        }
        iterates.push(row);
    }
    let threshold = rat(1, k as i64);
    let mut min_separation: Option<Rat> = None;
    let mut pairs_checked = 0u128;
    for i in 0..iterates.len() {
        for j in (i + 1)..iterates.len() {
            pairs_checked += 1;
            let mut best = Rat::zero();
            for step in 0..=(n as usize) {
                let d = star_hausdorff(&iterates[i][step], &iterates[j][step]);
                if d > best {
                    best = d;
                }
            }
            if best < threshold {
                // Cannot happen for distinct words; kept as a hard check.
                return Err(StarError::BudgetExceeded {
                    pairs: pairs_checked,
                    budget: 0,
                });
            }
            if min_separation.as_ref().is_none_or(|m| best < *m) {
                min_separation = Some(best);
            }
        }
    }
    let min_separation = min_separation.unwrap_or_else(|| rat(1, 1));
    Ok(EntropyCertificate {
        k,
        n,
        family_size,
        pairs_checked,
        min_separation,
        rate_bound_nats: (k as f64).ln(),
    })
}

fn enumerate_words(k: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![1u64; n];
    loop {
        out.push(cur.clone());
        let mut pos = 0;
        loop {
            if pos == n {
                return out;
            }
            if cur[pos] < k {
                cur[pos] += 1;
                break;
            }
            cur[pos] = 1;
            pos += 1;
        }
    }
}
