//! Hausdorff-metric geometry and induced dynamics on hyperspaces: finite
//! sets of at most n points, subtrees with at most n endpoints, and all
//! subtrees (the finite-tree stand-in for subcontinua).
//!
//! Subtree-to-subtree Hausdorff distance is evaluated at endpoints only:
//! along any arc leaving a subtree the distance to the other subtree is
//! affine with slope ±1 and has no interior local maximum, so the directed
//! supremum is attained at an endpoint (docs/algorithms.md; the dense
//! sampling oracle in the test suite cross-checks this). Distances involving
//! finite sets need the additional tent-peak candidates handled below.

use crate::dynamics::{omega_limit_detailed, OmegaKind, OmegaOptions};
use crate::plmap::{MapError, PLSelfMap};
use crate::scalar::Scalar;
use crate::subtree::SubTree;
use crate::tree::{MetricTree, Pos, TreeError, TreePoint};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum HyperError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("hyperspace element must be nonempty")]
    EmptyElement,
    #[error("finite set has {got} points, limit {limit}")]
    TooManyPoints { got: usize, limit: usize },
    #[error("subtree has {got} endpoints, limit {limit}")]
    TooManyEndpoints { got: usize, limit: usize },
    #[error("orbit did not resolve within the budget")]
    Unresolved,
    #[error("element kind does not match the hyperspace")]
    KindMismatch,
}

/// A point of a hyperspace: a finite set or a subtree.
#[derive(Debug, Clone)]
pub enum HyperElement<S> {
    Points(Vec<TreePoint<S>>),
    Tree(SubTree<S>),
}

impl<S: Scalar> PartialEq for HyperElement<S> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (HyperElement::Points(a), HyperElement::Points(b)) => a == b,
            (HyperElement::Tree(a), HyperElement::Tree(b)) => a == b,
            _ => false,
        }
    }
}

impl<S: Scalar> HyperElement<S> {
    /// Canonical finite-set element with at most `limit` points.
    pub fn finite_set(
        tree: &MetricTree<S>,
        points: &[TreePoint<S>],
        limit: usize,
    ) -> Result<Self, HyperError> {
        if points.is_empty() {
            return Err(HyperError::EmptyElement);
        }
        for p in points {
            tree.check_host(p).map_err(HyperError::Tree)?;
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| tree.cmp_points(a, b));
        pts.dedup();
        if pts.len() > limit {
            return Err(HyperError::TooManyPoints {
                got: pts.len(),
                limit,
            });
        }
        Ok(HyperElement::Points(pts))
    }

    /// Subtree element with at most `limit` endpoints (`usize::MAX` for the
    /// unconstrained subcontinuum hyperspace).
    pub fn subtree(sub: SubTree<S>, limit: usize) -> Result<Self, HyperError> {
        if sub.endpoints().len() > limit {
            return Err(HyperError::TooManyEndpoints {
                got: sub.endpoints().len(),
                limit,
            });
        }
        Ok(HyperElement::Tree(sub))
    }

    pub fn point_list(&self) -> &[TreePoint<S>] {
        match self {
            HyperElement::Points(p) => p,
            HyperElement::Tree(s) => s.endpoints(),
        }
    }
}

/// Exact Hausdorff distance between hyperspace elements.
pub fn hausdorff<S: Scalar>(
    tree: &MetricTree<S>,
    a: &HyperElement<S>,
    b: &HyperElement<S>,
) -> Result<S, HyperError> {
    let d = match (a, b) {
        (HyperElement::Points(pa), HyperElement::Points(pb)) => {
            let d1 = directed_points_to_points(tree, pa, pb)?;
            let d2 = directed_points_to_points(tree, pb, pa)?;
            if d1 > d2 {
                d1
            } else {
                d2
            }
        }
        (HyperElement::Tree(sa), HyperElement::Tree(sb)) => subtree_hausdorff(tree, sa, sb)?,
        (HyperElement::Points(pa), HyperElement::Tree(sb)) => {
            let d1 = directed_points_to_subtree(tree, pa, sb)?;
            let d2 = directed_subtree_to_points(tree, sb, pa)?;
            if d1 > d2 {
                d1
            } else {
                d2
            }
        }
        (HyperElement::Tree(sa), HyperElement::Points(pb)) => {
            let d1 = directed_subtree_to_points(tree, sa, pb)?;
            let d2 = directed_points_to_subtree(tree, pb, sa)?;
            if d1 > d2 {
                d1
            } else {
                d2
            }
        }
    };
    Ok(d)
}

/// Exact subtree-to-subtree Hausdorff distance (endpoint evaluation).
pub fn subtree_hausdorff<S: Scalar>(
    tree: &MetricTree<S>,
    a: &SubTree<S>,
    b: &SubTree<S>,
) -> Result<S, HyperError> {
    let mut best = S::zero();
    for e in a.endpoints() {
        let d = b.distance_to(tree, e)?;
        if d > best {
            best = d;
        }
    }
    for e in b.endpoints() {
        let d = a.distance_to(tree, e)?;
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

fn dist_point_to_finite<S: Scalar>(
    tree: &MetricTree<S>,
    p: &TreePoint<S>,
    set: &[TreePoint<S>],
) -> Result<S, HyperError> {
    let mut best: Option<S> = None;
    for q in set {
        let d = tree.distance(p, q)?;
        if best.as_ref().is_none_or(|b| d < *b) {
            best = Some(d);
        }
    }
    best.ok_or(HyperError::EmptyElement)
}

fn directed_points_to_points<S: Scalar>(
    tree: &MetricTree<S>,
    from: &[TreePoint<S>],
    to: &[TreePoint<S>],
) -> Result<S, HyperError> {
    let mut worst = S::zero();
    for p in from {
        let d = dist_point_to_finite(tree, p, to)?;
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

fn directed_points_to_subtree<S: Scalar>(
    tree: &MetricTree<S>,
    from: &[TreePoint<S>],
    to: &SubTree<S>,
) -> Result<S, HyperError> {
    let mut worst = S::zero();
    for p in from {
        let d = to.distance_to(tree, p)?;
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

/// sup over the subtree of the distance to a finite set. The distance
/// function is a minimum of slope-±1 tents, so interior maxima occur only at
/// tent peaks or tent crossings; all candidates are enumerated exactly.
fn directed_subtree_to_points<S: Scalar>(
    tree: &MetricTree<S>,
    from: &SubTree<S>,
    to: &[TreePoint<S>],
) -> Result<S, HyperError> {
    let mut worst = S::zero();
    let consider = |p: &TreePoint<S>, worst: &mut S| -> Result<(), HyperError> {
        let d = dist_point_to_finite(tree, p, to)?;
        if d > *worst {
            *worst = d;
        }
        Ok(())
    };
    for e in from.endpoints() {
        consider(e, &mut worst)?;
    }
    for v in 0..tree.vertex_count() {
        if from.contains_vertex(v) {
            let p = tree.vertex(v)?;
            consider(&p, &mut worst)?;
        }
    }
    let two = S::from_ratio(2, 1);
    for (e, iv) in from.intervals().iter().enumerate() {
        let Some((lo, hi)) = iv else { continue };
        if lo == hi {
            continue;
        }
        let edge = tree.edge(e);
        let (u_pt, v_pt) = (tree.vertex(edge.u)?, tree.vertex(edge.v)?);
        // Along the edge, each target contributes pieces of slope +1
        // (`t + a`) and slope -1 (`d - t`). A target at offset s on this
        // very edge is the V `|t - s|` (a = -s, d = s); any other target is
        // the through-endpoint tent (a = d(u, q), d = len + d(v, q)).
        let mut ascents: Vec<S> = Vec::with_capacity(to.len());
        let mut descents: Vec<S> = Vec::with_capacity(to.len());
        for q in to {
            let own_offset = match q.pos() {
                Pos::Inner { edge: eq, offset } if *eq == e => Some(offset.clone()),
                Pos::Vertex(w) => tree.vertex_offset_on_edge(*w, e),
                _ => None,
            };
            match own_offset {
                Some(s) => {
                    ascents.push(-s.clone());
                    descents.push(s);
                }
                None => {
                    ascents.push(tree.distance(&u_pt, q)?);
                    descents.push(edge.len.clone() + tree.distance(&v_pt, q)?);
                }
            }
        }
        // Every local maximum of the lower envelope sits where an ascending
        // piece crosses a descending one: t = (d - a)/2.
        for a in &ascents {
            for d in &descents {
                let t = (d.clone() - a.clone()) / two.clone();
                if t > *lo && t < *hi {
                    let p = tree.point_on_edge(e, t)?;
                    consider(&p, &mut worst)?;
                }
            }
        }
    }
    Ok(worst)
}

/// Pointwise image of a finite set; cardinality may drop on collisions.
pub fn induced_fn<S: Scalar>(
    f: &PLSelfMap<S>,
    elem: &HyperElement<S>,
    limit: usize,
) -> Result<HyperElement<S>, HyperError> {
    let HyperElement::Points(pts) = elem else {
        return Err(HyperError::KindMismatch);
    };
    let mut imgs = Vec::with_capacity(pts.len());
    for p in pts {
        imgs.push(f.evaluate(p)?);
    }
    HyperElement::finite_set(f.tree(), &imgs, limit)
}

/// Image of a subtree under a monotone map: the hull of the endpoint images
/// (equal to the exact image for monotone maps; endpoint count never grows).
pub fn induced_tn<S: Scalar>(
    f: &PLSelfMap<S>,
    elem: &HyperElement<S>,
    limit: usize,
) -> Result<HyperElement<S>, HyperError> {
    f.require_monotone()?;
    let HyperElement::Tree(sub) = elem else {
        return Err(HyperError::KindMismatch);
    };
    if sub.endpoints().len() > limit {
        return Err(HyperError::TooManyEndpoints {
            got: sub.endpoints().len(),
            limit,
        });
    }
    let mut imgs = Vec::with_capacity(sub.endpoints().len());
    for p in sub.endpoints() {
        imgs.push(f.evaluate(p)?);
    }
    let hull = SubTree::hull(f.tree(), &imgs)?;
    debug_assert!(hull.endpoints().len() <= sub.endpoints().len());
    Ok(HyperElement::Tree(hull))
}

/// An induced map on one of the three hyperspaces.
#[derive(Clone, Copy)]
pub enum InducedMap<'a, S> {
    /// Finite sets with at most n points.
    FiniteSets { f: &'a PLSelfMap<S>, n: usize },
    /// Subtrees with at most n endpoints.
    Subtrees { f: &'a PLSelfMap<S>, n: usize },
    /// All subtrees.
    Continua { f: &'a PLSelfMap<S> },
}

impl<'a, S: Scalar> InducedMap<'a, S> {
    pub fn base(&self) -> &'a PLSelfMap<S> {
        match self {
            InducedMap::FiniteSets { f, .. }
            | InducedMap::Subtrees { f, .. }
            | InducedMap::Continua { f } => f,
        }
    }

    pub fn tree(&self) -> &'a MetricTree<S> {
        self.base().tree()
    }

    pub fn step(&self, e: &HyperElement<S>) -> Result<HyperElement<S>, HyperError> {
        match self {
            InducedMap::FiniteSets { f, n } => induced_fn(f, e, *n),
            InducedMap::Subtrees { f, n } => induced_tn(f, e, *n),
            InducedMap::Continua { f } => induced_tn(f, e, usize::MAX),
        }
    }

    pub fn iterate(&self, e: &HyperElement<S>, n: usize) -> Result<HyperElement<S>, HyperError> {
        let mut x = e.clone();
        for _ in 0..n {
            x = self.step(&x)?;
        }
        Ok(x)
    }
}

/// ω-limit of a hyperspace element.
#[derive(Debug, Clone)]
pub struct HyperOmega<S> {
    pub cluster: Vec<HyperElement<S>>,
    pub exact_period: Option<usize>,
    /// Finite-instance minimality verdict (exact for exact cycles).
    pub minimal: Option<bool>,
}

/// Iterates the induced map with exact cycle detection, falling back to a
/// structural resolution through pointwise ω-limits, then to tail
/// clustering as evidence.
pub fn hyper_omega<S: Scalar>(
    space: &InducedMap<'_, S>,
    start: &HyperElement<S>,
    eps: &S,
    horizon: usize,
) -> Result<HyperOmega<S>, HyperError> {
    space.base().require_monotone()?;
    let budget = horizon.min(512);
    let mut elems = vec![start.clone()];
    let mut anchor = 0usize;
    let mut power = 1usize;
    for i in 1..=budget {
        let next = space.step(&elems[i - 1])?;
        elems.push(next);
        if elems[i] == elems[anchor] {
            let period = i - anchor;
            let mut mu = 0;
            while elems[mu] != elems[mu + period] {
                mu += 1;
            }
            return Ok(HyperOmega {
                cluster: elems[mu..mu + period].to_vec(),
                exact_period: Some(period),
                minimal: Some(true),
            });
        }
        if i - anchor == power {
            anchor = i;
            power *= 2;
        }
    }
    // Structural: the orbit converges to the induced orbit of its
    // asymptotic companion, whose cycle is exact.
    if let Ok(comp) = asymptotic_companion(space, start, eps, horizon) {
        let mut cyc = vec![comp.element.clone()];
        let mut b = comp.element.clone();
        for _ in 1..comp.induced_period {
            b = space.step(&b)?;
            cyc.push(b.clone());
        }
        return Ok(HyperOmega {
            cluster: cyc,
            exact_period: Some(comp.induced_period),
            minimal: Some(true),
        });
    }
    // Tail clustering as evidence.
    let tree = space.tree();
    let tail_from = elems.len() / 2;
    let mut reps: Vec<HyperElement<S>> = Vec::new();
    for e in &elems[tail_from..] {
        let mut close = false;
        for r in &reps {
            if hausdorff(tree, e, r)? < *eps {
                close = true;
                break;
            }
        }
        if !close {
            reps.push(e.clone());
        }
    }
    // Revisit-based minimality evidence over one more sweep.
    let mut minimal = true;
    'outer: for r in &reps {
        let mut x = r.clone();
        let steps = (reps.len() + 1) * 4;
        let mut visited = vec![false; reps.len()];
        for _ in 0..steps {
            x = space.step(&x)?;
            for (k, other) in reps.iter().enumerate() {
                if hausdorff(tree, &x, other)? < *eps {
                    visited[k] = true;
                }
            }
        }
        if visited.iter().any(|v| !v) {
            minimal = false;
            break 'outer;
        }
    }
    Ok(HyperOmega {
        cluster: reps,
        exact_period: None,
        minimal: Some(minimal),
    })
}

/// Companion certificate: an exactly periodic element asymptotic to the
/// input, with the step from which the distance bound is certified below ε.
#[derive(Debug, Clone)]
pub struct Companion<S> {
    pub element: HyperElement<S>,
    pub induced_period: usize,
    /// First step n with certified d_H of the two induced orbits below ε
    /// from n on.
    pub certified_from: usize,
    pub eps: S,
    /// Distance from the companion to the nearest exact periodic element
    /// (zero: the companion itself is periodic).
    pub nearest_periodic_distance: S,
}

/// For each coordinate (point or endpoint) picks the ω-limit member it is
/// asymptotic to, phase-aligned; the resulting element is exactly periodic
/// under the induced map and asymptotic to the input. Hull continuity in
/// the geodesic metric transfers the pointwise bound to subtree elements.
pub fn asymptotic_companion<S: Scalar>(
    space: &InducedMap<'_, S>,
    elem: &HyperElement<S>,
    eps: &S,
    horizon: usize,
) -> Result<Companion<S>, HyperError> {
    let f = space.base();
    f.require_monotone()?;
    let tree = space.tree();
    let coords: &[TreePoint<S>] = elem.point_list();
    let mut partners: Vec<TreePoint<S>> = Vec::with_capacity(coords.len());
    let mut certified_from = 0usize;
    let opts = OmegaOptions::default();
    for x in coords {
        let (om, alignment) = omega_limit_detailed(f, x, eps, horizon, &opts)?;
        let (period, alignment) = match (&om.kind, alignment) {
            (OmegaKind::ExactPeriodic { period }, Some(al)) => (*period, al),
            _ => return Err(HyperError::Unresolved),
        };
        let n0 = alignment
            .certified_step(eps, horizon)
            .ok_or(HyperError::Unresolved)?;
        certified_from = certified_from.max(n0);
        // Phase alignment: y with f^start(y) = limit.
        let j = (period - alignment.start % period) % period;
        let y = f.iterate(&alignment.limit, j)?;
        partners.push(y);
    }
    let element = match elem {
        HyperElement::Points(_) => {
            HyperElement::finite_set(tree, &partners, coords.len().max(1))?
        }
        HyperElement::Tree(_) => HyperElement::Tree(SubTree::hull(tree, &partners)?),
    };
    // The companion is exactly periodic; find its induced period.
    let mut period = None;
    let mut b = element.clone();
    for k in 1..=4096usize {
        b = space.step(&b)?;
        if b == element {
            period = Some(k);
            break;
        }
    }
    let induced_period = period.ok_or(HyperError::Unresolved)?;
    Ok(Companion {
        element,
        induced_period,
        certified_from,
        eps: eps.clone(),
        nearest_periodic_distance: S::zero(),
    })
}

/// Tail statistics of d_H between two induced orbits (evidence-grade; run on
/// the f64 instantiation for long horizons).
#[derive(Debug, Clone)]
pub struct HyperPairStats<S> {
    pub tail_inf: S,
    pub tail_sup: S,
    pub window: (usize, usize),
}

pub fn pair_tail_stats<S: Scalar>(
    space: &InducedMap<'_, S>,
    a: &HyperElement<S>,
    b: &HyperElement<S>,
    horizon: usize,
) -> Result<HyperPairStats<S>, HyperError> {
    let tree = space.tree();
    let start = horizon / 2;
    let mut x = a.clone();
    let mut y = b.clone();
    let mut tail_inf: Option<S> = None;
    let mut tail_sup: Option<S> = None;
    for n in 0..=horizon {
        if n >= start {
            let d = hausdorff(tree, &x, &y)?;
            if tail_inf.as_ref().is_none_or(|v| d < *v) {
                tail_inf = Some(d.clone());
            }
            if tail_sup.as_ref().is_none_or(|v| d > *v) {
                tail_sup = Some(d);
            }
        }
        if n < horizon {
            x = space.step(&x)?;
            y = space.step(&y)?;
        }
    }
    Ok(HyperPairStats {
        tail_inf: tail_inf.expect("window nonempty"),
        tail_sup: tail_sup.expect("window nonempty"),
        window: (start, horizon),
    })
}

/// Converts an element to another scalar instantiation over the
/// corresponding converted tree.
pub fn convert_element<S: Scalar, T: Scalar>(
    src_tree: &MetricTree<S>,
    dst_tree: &MetricTree<T>,
    elem: &HyperElement<S>,
    conv: &impl Fn(&S) -> T,
) -> Result<HyperElement<T>, HyperError> {
    match elem {
        HyperElement::Points(pts) => {
            let mut out = Vec::with_capacity(pts.len());
            for p in pts {
                out.push(src_tree.convert_point(dst_tree, p, conv)?);
            }
            HyperElement::finite_set(dst_tree, &out, usize::MAX)
        }
        HyperElement::Tree(sub) => {
            let mut out = Vec::with_capacity(sub.endpoints().len());
            for p in sub.endpoints() {
                out.push(src_tree.convert_point(dst_tree, p, conv)?);
            }
            Ok(HyperElement::Tree(SubTree::hull(dst_tree, &out)?))
        }
    }
}
