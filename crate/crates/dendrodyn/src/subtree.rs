//! Subtrees: convex hulls of finite point sets, represented exactly.
//!
//! A subtree intersects each edge in a (possibly empty) closed subinterval,
//! so the realized point set is stored as one interval per edge plus vertex
//! membership flags. The public identity of a subtree is its irredundant
//! endpoint list; the hull of that list reproduces the intervals.

use crate::scalar::Scalar;
use crate::tree::{MetricTree, Pos, TreeError, TreePoint};

/// Subtree of a metric tree: the convex hull of its endpoint set.
#[derive(Debug, Clone)]
pub struct SubTree<S> {
    host: u64,
    endpoints: Vec<TreePoint<S>>,
    intervals: Vec<Option<(S, S)>>,
    vin: Vec<bool>,
}

impl<S: Scalar> PartialEq for SubTree<S> {
    fn eq(&self, other: &Self) -> bool {
        self.host == other.host && self.endpoints == other.endpoints
    }
}

impl<S: Scalar> SubTree<S> {
    /// Smallest subtree containing all input points.
    pub fn hull(tree: &MetricTree<S>, points: &[TreePoint<S>]) -> Result<Self, TreeError> {
        if points.is_empty() {
            return Err(TreeError::EmptyInput("hull point list"));
        }
        for p in points {
            tree.check_host(p)?;
        }
        let mut pts: Vec<TreePoint<S>> = points.to_vec();
        pts.sort_by(|a, b| tree.cmp_points(a, b));
        pts.dedup();

        let mut intervals: Vec<Option<(S, S)>> = vec![None; tree.edge_count()];
        let mut vin = vec![false; tree.vertex_count()];
        let base = &pts[0];
        match base.pos() {
            Pos::Vertex(v) => vin[*v] = true,
            Pos::Inner { edge, offset } => {
                intervals[*edge] = Some((offset.clone(), offset.clone()))
            }
        }
        for p in &pts[1..] {
            let arc = tree.arc(base, p)?;
            for seg in arc.segments() {
                let (lo, hi) = if seg.from < seg.to {
                    (seg.from.clone(), seg.to.clone())
                } else {
                    (seg.to.clone(), seg.from.clone())
                };
                intervals[seg.edge] = Some(match intervals[seg.edge].take() {
                    None => (lo, hi),
                    Some((a, b)) => (if lo < a { lo } else { a }, if hi > b { hi } else { b }),
                });
            }
        }
        // Vertex membership from interval boundaries.
        for (e, iv) in intervals.iter().enumerate() {
            if let Some((a, b)) = iv {
                let edge = tree.edge(e);
                if *a == S::zero() {
                    vin[edge.u] = true;
                }
                if *b == edge.len {
                    vin[edge.v] = true;
                }
            }
        }
        let endpoints = endpoints_from_intervals(tree, &intervals, &vin, &pts);
        Ok(SubTree {
            host: tree.id(),
            endpoints,
            intervals,
            vin,
        })
    }

    /// Degenerate subtree consisting of one point.
    pub fn point(tree: &MetricTree<S>, p: &TreePoint<S>) -> Result<Self, TreeError> {
        Self::hull(tree, std::slice::from_ref(p))
    }

    /// Builds directly from a per-edge interval map (used for exact images of
    /// subtrees); endpoint list is derived geometrically.
    pub(crate) fn from_intervals(
        tree: &MetricTree<S>,
        intervals: Vec<Option<(S, S)>>,
        vin: Vec<bool>,
    ) -> Self {
        let endpoints = endpoints_from_intervals(tree, &intervals, &vin, &[]);
        SubTree {
            host: tree.id(),
            endpoints,
            intervals,
            vin,
        }
    }

    pub fn host_id(&self) -> u64 {
        self.host
    }

    pub fn endpoints(&self) -> &[TreePoint<S>] {
        &self.endpoints
    }

    pub fn intervals(&self) -> &[Option<(S, S)>] {
        &self.intervals
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vin[v]
    }

    pub fn member(&self, tree: &MetricTree<S>, p: &TreePoint<S>) -> Result<bool, TreeError> {
        tree.check_host(p)?;
        if self.host != tree.id() {
            return Err(TreeError::HostMismatch);
        }
        Ok(match p.pos() {
            Pos::Vertex(v) => self.vin[*v],
            Pos::Inner { edge, offset } => match &self.intervals[*edge] {
                Some((a, b)) => *a <= *offset && *offset <= *b,
                None => false,
            },
        })
    }

    /// Nadler's first point map: `p` itself when `p` lies in the subtree,
    /// otherwise the unique entry point of any arc from `p` into it. It is
    /// also the point of the subtree nearest to `p`.
    pub fn first_point(
        &self,
        tree: &MetricTree<S>,
        p: &TreePoint<S>,
    ) -> Result<TreePoint<S>, TreeError> {
        if self.member(tree, p)? {
            return Ok(p.clone());
        }
        let target = &self.endpoints[0];
        let arc = tree.arc(p, target)?;
        for seg in arc.segments() {
            if let Some((a, b)) = &self.intervals[seg.edge] {
                let (lo, hi) = if seg.from < seg.to {
                    (seg.from.clone(), seg.to.clone())
                } else {
                    (seg.to.clone(), seg.from.clone())
                };
                let cut_lo = if *a > lo { a.clone() } else { lo.clone() };
                let cut_hi = if *b < hi { b.clone() } else { hi.clone() };
                if cut_lo <= cut_hi {
                    // First covered offset in traversal direction.
                    let entry = if seg.from < seg.to { cut_lo } else { cut_hi };
                    return tree.point_on_edge(seg.edge, entry);
                }
            }
            // Check the vertex the segment ends at.
            let endpt = tree.point_on_edge(seg.edge, seg.to.clone())?;
            if let Pos::Vertex(v) = endpt.pos() {
                if self.vin[*v] {
                    return Ok(endpt);
                }
            }
        }
        unreachable!("arc into a nonempty subtree must enter it");
    }

    /// Geodesic distance from a point to the subtree.
    pub fn distance_to(&self, tree: &MetricTree<S>, p: &TreePoint<S>) -> Result<S, TreeError> {
        let fp = self.first_point(tree, p)?;
        tree.distance(p, &fp)
    }

    /// Order of a point inside the subtree (1 = endpoint, 2 = arc interior,
    /// branch degree at vertices).
    pub fn order_in(&self, tree: &MetricTree<S>, p: &TreePoint<S>) -> Result<usize, TreeError> {
        if !self.member(tree, p)? {
            return Err(TreeError::NotInSubtree);
        }
        if self.is_single_point() {
            return Ok(1);
        }
        Ok(match p.pos() {
            Pos::Vertex(v) => subtree_vertex_degree(tree, &self.intervals, *v),
            Pos::Inner { edge, offset } => {
                let (a, b) = self.intervals[*edge].as_ref().expect("member");
                let mut deg = 0;
                if offset > a {
                    deg += 1;
                }
                if offset < b {
                    deg += 1;
                }
                deg
            }
        })
    }

    pub fn is_single_point(&self) -> bool {
        self.endpoints.len() == 1
    }

    /// Total arc length of the subtree.
    pub fn realized_length(&self) -> S {
        let mut acc = S::zero();
        for iv in self.intervals.iter().flatten() {
            acc = acc + (iv.1.clone() - iv.0.clone());
        }
        acc
    }
}

fn subtree_vertex_degree<S: Scalar>(
    tree: &MetricTree<S>,
    intervals: &[Option<(S, S)>],
    v: usize,
) -> usize {
    let mut deg = 0;
    for &(e, _) in tree.neighbors(v) {
        if let Some((a, b)) = &intervals[e] {
            if a == b {
                continue;
            }
            let edge = tree.edge(e);
            if (edge.u == v && *a == S::zero()) || (edge.v == v && *b == edge.len) {
                deg += 1;
            }
        }
    }
    deg
}

/// Points of order 1 of the realized set: mid-edge interval boundaries plus
/// vertices with exactly one direction into the set.
fn endpoints_from_intervals<S: Scalar>(
    tree: &MetricTree<S>,
    intervals: &[Option<(S, S)>],
    vin: &[bool],
    singleton_hint: &[TreePoint<S>],
) -> Vec<TreePoint<S>> {
    let mut out: Vec<TreePoint<S>> = Vec::new();
    let mut any_positive = false;
    for (e, iv) in intervals.iter().enumerate() {
        if let Some((a, b)) = iv {
            let edge = tree.edge(e);
            if a == b {
                continue;
            }
            any_positive = true;
            if *a > S::zero() {
                out.push(tree.point_on_edge(e, a.clone()).expect("valid offset"));
            }
            if *b < edge.len {
                out.push(tree.point_on_edge(e, b.clone()).expect("valid offset"));
            }
        }
    }
    if !any_positive {
        // Single-point set: a lone vertex or a degenerate interval.
        if let Some(p) = singleton_hint.first() {
            return vec![p.clone()];
        }
        for (v, inside) in vin.iter().enumerate() {
            if *inside {
                return vec![tree.vertex(v).expect("valid vertex")];
            }
        }
        for (e, iv) in intervals.iter().enumerate() {
            if let Some((a, _)) = iv {
                return vec![tree.point_on_edge(e, a.clone()).expect("valid offset")];
            }
        }
        return out;
    }
    for (v, inside) in vin.iter().enumerate() {
        if *inside && subtree_vertex_degree(tree, intervals, v) <= 1 {
            out.push(tree.vertex(v).expect("valid vertex"));
        }
    }
    out.sort_by(|a, b| tree.cmp_points(a, b));
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};
    use crate::tree::interval_tree;

    fn y_tree() -> MetricTree<Rat> {
        MetricTree::new(
            vec!["c".into(), "a".into(), "b".into(), "d".into()],
            vec![(0, 1, rat(1, 1)), (0, 2, rat(1, 1)), (0, 3, rat(1, 1))],
        )
        .unwrap()
    }

    #[test]
    fn hull_of_single_point_is_degenerate() {
        let t = y_tree();
        let p = t.point_on_edge(1, rat(1, 3)).unwrap();
        let s = SubTree::point(&t, &p).unwrap();
        assert!(s.is_single_point());
        assert_eq!(s.endpoints(), std::slice::from_ref(&p));
        assert!(s.member(&t, &p).unwrap());
        assert_eq!(s.order_in(&t, &p).unwrap(), 1);
    }

    #[test]
    fn hull_of_all_leaves_is_whole_y_tree() {
        let t = y_tree();
        let pts = vec![
            t.vertex(1).unwrap(),
            t.vertex(2).unwrap(),
            t.vertex(3).unwrap(),
        ];
        let s = SubTree::hull(&t, &pts).unwrap();
        assert_eq!(s.endpoints().len(), 3);
        assert_eq!(s.realized_length(), rat(3, 1));
        assert!(s.member(&t, &t.vertex(0).unwrap()).unwrap());
    }

    #[test]
    fn interior_point_dropped_from_endpoint_list() {
        let t = y_tree();
        let pts = vec![
            t.vertex(1).unwrap(),
            t.vertex(0).unwrap(),
            t.vertex(2).unwrap(),
        ];
        let s = SubTree::hull(&t, &pts).unwrap();
        assert_eq!(
            s.endpoints(),
            &[t.vertex(1).unwrap(), t.vertex(2).unwrap()]
        );
    }

    #[test]
    fn hull_is_idempotent() {
        let t = y_tree();
        let pts = vec![
            t.vertex(1).unwrap(),
            t.point_on_edge(2, rat(1, 2)).unwrap(),
            t.point_on_edge(0, rat(1, 4)).unwrap(),
        ];
        let s = SubTree::hull(&t, &pts).unwrap();
        let s2 = SubTree::hull(&t, s.endpoints()).unwrap();
        assert_eq!(s, s2);
        assert_eq!(s.intervals(), s2.intervals());
    }

    #[test]
    fn first_point_identity_inside() {
        let t = y_tree();
        let s = SubTree::hull(&t, &[t.vertex(0).unwrap(), t.vertex(1).unwrap()]).unwrap();
        let p = t.point_on_edge(0, rat(1, 2)).unwrap();
        assert_eq!(s.first_point(&t, &p).unwrap(), p);
    }

    #[test]
    fn first_point_from_other_branch_is_center() {
        let t = y_tree();
        // Y = edge [c,a]
        let s = SubTree::hull(&t, &[t.vertex(0).unwrap(), t.vertex(1).unwrap()]).unwrap();
        let b = t.vertex(2).unwrap();
        assert_eq!(s.first_point(&t, &b).unwrap(), t.vertex(0).unwrap());
        assert_eq!(s.distance_to(&t, &b).unwrap(), rat(1, 1));
    }

    #[test]
    fn first_point_on_interval() {
        let t = interval_tree(rat(1, 1));
        let s = SubTree::hull(
            &t,
            &[t.vertex(0).unwrap(), t.point_on_edge(0, rat(1, 2)).unwrap()],
        )
        .unwrap();
        let p = t.point_on_edge(0, rat(9, 10)).unwrap();
        assert_eq!(
            s.first_point(&t, &p).unwrap(),
            t.point_on_edge(0, rat(1, 2)).unwrap()
        );
    }

    #[test]
    fn empty_hull_is_an_error() {
        let t = y_tree();
        assert!(matches!(
            SubTree::hull(&t, &[]),
            Err(TreeError::EmptyInput(_))
        ));
    }
}
