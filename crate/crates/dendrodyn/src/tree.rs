//! Finite metric trees: the desk-scale dendrite model.
//!
//! A [`MetricTree`] is a finite weighted tree with positive edge lengths,
//! carrying the geodesic (arc-length) metric. Points live either at vertices
//! or strictly inside edges; offsets equal to 0 or to the edge length are
//! normalized to the vertex form so equality is decidable.

use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

static NEXT_TREE_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Error, Debug)]
pub enum TreeError {
    #[error("tree must have at least one vertex")]
    Empty,
    #[error("duplicate vertex name {0:?}")]
    DuplicateName(String),
    #[error("edge endpoint index {0} out of range")]
    BadEndpoint(usize),
    #[error("edge {u}-{v} has non-positive length")]
    NonPositiveLength { u: String, v: String },
    #[error("{vertices} vertices need exactly {} edges, found {edges}", vertices - 1)]
    WrongEdgeCount { vertices: usize, edges: usize },
    #[error("vertex {0:?} is unreachable; the tree must be connected")]
    Disconnected(String),
    #[error("edge index {0} out of range")]
    BadEdge(usize),
    #[error("vertex index {0} out of range")]
    BadVertex(usize),
    #[error("point does not belong to this tree")]
    HostMismatch,
    #[error("offset lies outside the edge")]
    OffsetOutOfRange,
    #[error("{0} must not be empty")]
    EmptyInput(&'static str),
    #[error("tolerance must be strictly positive")]
    NonPositiveTolerance,
    #[error("point is not contained in the subtree")]
    NotInSubtree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<S> {
    pub u: VertexId,
    pub v: VertexId,
    pub len: S,
}

#[derive(Debug)]
struct TreeInner<S> {
    id: u64,
    names: Vec<String>,
    edges: Vec<Edge<S>>,
    adj: Vec<Vec<(EdgeId, VertexId)>>,
    parent: Vec<Option<(VertexId, EdgeId)>>,
    hops: Vec<usize>,
    vdist: Vec<Vec<S>>,
}

/// Immutable weighted tree; cheap to clone and share across threads.
#[derive(Debug, Clone)]
pub struct MetricTree<S>(Arc<TreeInner<S>>);

/// Location on a tree: a vertex, or a point strictly inside an edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TreePoint<S> {
    host: u64,
    pos: Pos<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pos<S> {
    Vertex(VertexId),
    Inner { edge: EdgeId, offset: S },
}

impl<S: Scalar> TreePoint<S> {
    pub fn pos(&self) -> &Pos<S> {
        &self.pos
    }

    pub fn host_id(&self) -> u64 {
        self.host
    }

    pub fn as_vertex(&self) -> Option<VertexId> {
        match self.pos {
            Pos::Vertex(v) => Some(v),
            Pos::Inner { .. } => None,
        }
    }
}

/// One traversed piece of an arc: edge `edge` from offset `from` to offset
/// `to` (`from != to`; direction matters).
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSeg<S> {
    pub edge: EdgeId,
    pub from: S,
    pub to: S,
}

/// The unique simple path between two points, as ordered edge pieces.
#[derive(Debug, Clone)]
pub struct ArcPath<S> {
    start: TreePoint<S>,
    end: TreePoint<S>,
    segments: Vec<ArcSeg<S>>,
    length: S,
}

impl<S: Scalar> ArcPath<S> {
    pub fn start(&self) -> &TreePoint<S> {
        &self.start
    }

    pub fn end(&self) -> &TreePoint<S> {
        &self.end
    }

    pub fn segments(&self) -> &[ArcSeg<S>] {
        &self.segments
    }

    pub fn length(&self) -> &S {
        &self.length
    }

    pub fn is_degenerate(&self) -> bool {
        self.segments.is_empty()
    }

    /// Point at arc-length parameter `s` from the start, `0 <= s <= length`.
    pub fn point_at(&self, tree: &MetricTree<S>, s: &S) -> Result<TreePoint<S>, TreeError> {
        if *s < S::zero() || *s > self.length {
            return Err(TreeError::OffsetOutOfRange);
        }
        if self.segments.is_empty() {
            return Ok(self.start.clone());
        }
        let mut remaining = s.clone();
        for seg in &self.segments {
            let seglen = (seg.to.clone() - seg.from.clone()).abs();
            if remaining <= seglen {
                let offset = if seg.from < seg.to {
                    seg.from.clone() + remaining
                } else {
                    seg.from.clone() - remaining
                };
                return tree.point_on_edge(seg.edge, offset);
            }
            remaining = remaining - seglen;
        }
        Ok(self.end.clone())
    }
}

impl<S: Scalar> PartialEq for MetricTree<S> {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl<S: Scalar> MetricTree<S> {
    /// Builds a tree from vertex names and `(u, v, len)` edges, validating
    /// connectivity, acyclicity and positive lengths.
    pub fn new(
        names: Vec<String>,
        edge_list: Vec<(VertexId, VertexId, S)>,
    ) -> Result<Self, TreeError> {
        let n = names.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        {
            let mut seen = names.clone();
            seen.sort();
            for w in seen.windows(2) {
                if w[0] == w[1] {
                    return Err(TreeError::DuplicateName(w[0].clone()));
                }
            }
        }
        if edge_list.len() != n - 1 {
            return Err(TreeError::WrongEdgeCount {
                vertices: n,
                edges: edge_list.len(),
            });
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut adj = vec![Vec::new(); n];
        for (i, (u, v, len)) in edge_list.into_iter().enumerate() {
            if u >= n {
                return Err(TreeError::BadEndpoint(u));
            }
            if v >= n {
                return Err(TreeError::BadEndpoint(v));
            }
            if len <= S::zero() {
                return Err(TreeError::NonPositiveLength {
                    u: names[u].clone(),
                    v: names[v].clone(),
                });
            }
            adj[u].push((i, v));
            adj[v].push((i, u));
            edges.push(Edge { u, v, len });
        }
        // BFS from vertex 0: connectivity plus parent pointers.
        let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
        let mut hops = vec![usize::MAX; n];
        hops[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &(e, w) in &adj[u] {
                if hops[w] == usize::MAX {
                    hops[w] = hops[u] + 1;
                    parent[w] = Some((u, e));
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = hops.iter().position(|&h| h == usize::MAX) {
            return Err(TreeError::Disconnected(names[v].clone()));
        }
        // All-pairs vertex distances (trees are small; O(V^2) is fine).
        let mut vdist = vec![vec![S::zero(); n]; n];
        for src in 0..n {
            let mut seen = vec![false; n];
            seen[src] = true;
            let mut queue = std::collections::VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                for &(e, w) in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        vdist[src][w] = vdist[src][u].clone() + edges[e].len.clone();
                        queue.push_back(w);
                    }
                }
            }
        }
        Ok(MetricTree(Arc::new(TreeInner {
            id: NEXT_TREE_ID.fetch_add(1, AtomicOrdering::Relaxed),
            names,
            edges,
            adj,
            parent,
            hops,
            vdist,
        })))
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn vertex_count(&self) -> usize {
        self.0.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.0.edges.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.0.names[v]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.0.names.iter().position(|n| n == name)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge<S> {
        &self.0.edges[e]
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.0.edges
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.0.adj[v].len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.0.adj[v]
    }

    pub fn total_length(&self) -> S {
        let mut acc = S::zero();
        for e in &self.0.edges {
            acc = acc + e.len.clone();
        }
        acc
    }

    pub fn vertex_distance(&self, u: VertexId, v: VertexId) -> &S {
        &self.0.vdist[u][v]
    }

    pub fn vertex(&self, v: VertexId) -> Result<TreePoint<S>, TreeError> {
        if v >= self.vertex_count() {
            return Err(TreeError::BadVertex(v));
        }
        Ok(TreePoint {
            host: self.0.id,
            pos: Pos::Vertex(v),
        })
    }

    /// Point at `offset` from endpoint `u` of edge `e`; offsets 0 and `len`
    /// canonicalize to the vertex form.
    pub fn point_on_edge(&self, e: EdgeId, offset: S) -> Result<TreePoint<S>, TreeError> {
        let edge = self.0.edges.get(e).ok_or(TreeError::BadEdge(e))?;
        if offset < S::zero() || offset > edge.len {
            return Err(TreeError::OffsetOutOfRange);
        }
        let pos = if offset == S::zero() {
            Pos::Vertex(edge.u)
        } else if offset == edge.len {
            Pos::Vertex(edge.v)
        } else {
            Pos::Inner { edge: e, offset }
        };
        Ok(TreePoint { host: self.0.id, pos })
    }

    pub fn check_host(&self, p: &TreePoint<S>) -> Result<(), TreeError> {
        if p.host == self.0.id {
            Ok(())
        } else {
            Err(TreeError::HostMismatch)
        }
    }

    /// Offset of vertex `v` on edge `e` when `v` is one of its endpoints.
    pub fn vertex_offset_on_edge(&self, v: VertexId, e: EdgeId) -> Option<S> {
        let edge = &self.0.edges[e];
        if edge.u == v {
            Some(S::zero())
        } else if edge.v == v {
            Some(edge.len.clone())
        } else {
            None
        }
    }

    /// Distances from an edge point to the two endpoints of its edge.
    fn end_dists(&self, p: &TreePoint<S>) -> Vec<(VertexId, S)> {
        match &p.pos {
            Pos::Vertex(v) => vec![(*v, S::zero())],
            Pos::Inner { edge, offset } => {
                let e = &self.0.edges[*edge];
                vec![
                    (e.u, offset.clone()),
                    (e.v, e.len.clone() - offset.clone()),
                ]
            }
        }
    }

    /// Geodesic distance.
    pub fn distance(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> Result<S, TreeError> {
        self.check_host(p)?;
        self.check_host(q)?;
        if let (Pos::Inner { edge: e1, offset: t1 }, Pos::Inner { edge: e2, offset: t2 }) =
            (&p.pos, &q.pos)
        {
            if e1 == e2 {
                return Ok((t1.clone() - t2.clone()).abs());
            }
        }
        let mut best: Option<S> = None;
        for (a, da) in self.end_dists(p) {
            for (b, db) in self.end_dists(q) {
                let cand = da.clone() + self.0.vdist[a][b].clone() + db.clone();
                if best.as_ref().is_none_or(|cur| cand < *cur) {
                    best = Some(cand);
                }
            }
        }
        Ok(best.expect("points always have anchor vertices"))
    }

    /// Vertex path from `a` to `b` as oriented edges.
    fn vertex_path(&self, a: VertexId, b: VertexId) -> Vec<(EdgeId, VertexId, VertexId)> {
        let inner = &self.0;
        let mut up_a = Vec::new();
        let mut up_b = Vec::new();
        let (mut x, mut y) = (a, b);
        while inner.hops[x] > inner.hops[y] {
            let (px, e) = inner.parent[x].expect("non-root has parent");
            up_a.push((e, x, px));
            x = px;
        }
        while inner.hops[y] > inner.hops[x] {
            let (py, e) = inner.parent[y].expect("non-root has parent");
            up_b.push((e, y, py));
            y = py;
        }
        while x != y {
            let (px, ea) = inner.parent[x].expect("non-root has parent");
            up_a.push((ea, x, px));
            x = px;
            let (py, eb) = inner.parent[y].expect("non-root has parent");
            up_b.push((eb, y, py));
            y = py;
        }
        for (e, from, to) in up_b.into_iter().rev() {
            up_a.push((e, to, from));
        }
        up_a
    }

    /// The unique arc between two points.
    pub fn arc(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> Result<ArcPath<S>, TreeError> {
        self.check_host(p)?;
        self.check_host(q)?;
        if p == q {
            return Ok(ArcPath {
                start: p.clone(),
                end: q.clone(),
                segments: Vec::new(),
                length: S::zero(),
            });
        }
        // Same-edge case: one partial segment.
        if let (Pos::Inner { edge: e1, offset: t1 }, Pos::Inner { edge: e2, offset: t2 }) =
            (&p.pos, &q.pos)
        {
            if e1 == e2 {
                let seg = ArcSeg {
                    edge: *e1,
                    from: t1.clone(),
                    to: t2.clone(),
                };
                return Ok(ArcPath {
                    start: p.clone(),
                    end: q.clone(),
                    segments: vec![seg],
                    length: (t1.clone() - t2.clone()).abs(),
                });
            }
        }
        // Pick exit/entry anchor vertices minimizing total length; the
        // minimum is strict in a tree with positive edge lengths.
        let mut best: Option<(S, VertexId, S, VertexId, S)> = None;
        for (a, da) in self.end_dists(p) {
            for (b, db) in self.end_dists(q) {
                let total = da.clone() + self.0.vdist[a][b].clone() + db.clone();
                if best.as_ref().is_none_or(|(cur, ..)| total < *cur) {
                    best = Some((total, a, da.clone(), b, db.clone()));
                }
            }
        }
        let (length, a, _da, b, db) = best.expect("anchors exist");
        let mut segments = Vec::new();
        if let Pos::Inner { edge, offset } = &p.pos {
            let exit_off = self
                .vertex_offset_on_edge(a, *edge)
                .expect("anchor is an endpoint of p's edge");
            if *offset != exit_off {
                segments.push(ArcSeg {
                    edge: *edge,
                    from: offset.clone(),
                    to: exit_off,
                });
            }
        }
        for (e, from, _to) in self.vertex_path(a, b) {
            let edge = &self.0.edges[e];
            let (f, t) = if edge.u == from {
                (S::zero(), edge.len.clone())
            } else {
                (edge.len.clone(), S::zero())
            };
            segments.push(ArcSeg { edge: e, from: f, to: t });
        }
        if let Pos::Inner { edge, offset } = &q.pos {
            let entry_off = self
                .vertex_offset_on_edge(b, *edge)
                .expect("anchor is an endpoint of q's edge");
            if db != S::zero() {
                segments.push(ArcSeg {
                    edge: *edge,
                    from: entry_off,
                    to: offset.clone(),
                });
            }
        }
        Ok(ArcPath {
            start: p.clone(),
            end: q.clone(),
            segments,
            length,
        })
    }

    /// Number of connected components of the tree minus the point.
    pub fn point_order(&self, p: &TreePoint<S>) -> Result<usize, TreeError> {
        self.check_host(p)?;
        Ok(match &p.pos {
            Pos::Vertex(v) => self.0.adj[*v].len(),
            Pos::Inner { .. } => 2,
        })
    }

    /// Uniform continuity modulus for arcs: any `delta < eps` works in the
    /// geodesic metric, where `diam([x,y]) = d(x,y)`; returns `eps/2`.
    pub fn modulus_delta(&self, eps: &S) -> Result<S, TreeError> {
        if *eps <= S::zero() {
            return Err(TreeError::NonPositiveTolerance);
        }
        Ok(eps.clone() / S::from_ratio(2, 1))
    }

    /// Total order on points used for canonical sorting: vertices by index,
    /// then edge points by (edge, offset).
    pub fn cmp_points(&self, a: &TreePoint<S>, b: &TreePoint<S>) -> Ordering {
        match (&a.pos, &b.pos) {
            (Pos::Vertex(x), Pos::Vertex(y)) => x.cmp(y),
            (Pos::Vertex(_), Pos::Inner { .. }) => Ordering::Less,
            (Pos::Inner { .. }, Pos::Vertex(_)) => Ordering::Greater,
            (Pos::Inner { edge: e1, offset: t1 }, Pos::Inner { edge: e2, offset: t2 }) => e1
                .cmp(e2)
                .then_with(|| t1.partial_cmp(t2).expect("offsets are comparable")),
        }
    }

    /// Rebuilds the same tree over another scalar type.
    pub fn map_scalar<T: Scalar>(&self, f: &impl Fn(&S) -> T) -> MetricTree<T> {
        let edges = self
            .0
            .edges
            .iter()
            .map(|e| (e.u, e.v, f(&e.len)))
            .collect();
        MetricTree::new(self.0.names.clone(), edges).expect("valid tree stays valid")
    }

    /// Converts a point to the corresponding point on a converted tree.
    pub fn convert_point<T: Scalar>(
        &self,
        target: &MetricTree<T>,
        p: &TreePoint<S>,
        f: &impl Fn(&S) -> T,
    ) -> Result<TreePoint<T>, TreeError> {
        self.check_host(p)?;
        match &p.pos {
            Pos::Vertex(v) => target.vertex(*v),
            Pos::Inner { edge, offset } => {
                let off = f(offset);
                let len = target.edge(*edge).len.clone();
                let off = if off < T::zero() {
                    T::zero()
                } else if off > len {
                    len
                } else {
                    off
                };
                target.point_on_edge(*edge, off)
            }
        }
    }
}

/// Convenience: an interval `[0, len]` as a 2-vertex tree.
pub fn interval_tree<S: Scalar>(len: S) -> MetricTree<S> {
    MetricTree::new(
        vec!["a".into(), "b".into()],
        vec![(0, 1, len)],
    )
    .expect("interval is a valid tree")
}
