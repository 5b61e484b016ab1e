//! Piecewise-linear self-maps of metric trees.
//!
//! A map is given by its vertex images; each edge `[u,v]` is sent onto the
//! arc `[f(u), f(v)]` by constant-speed parametrization (collapsing to a
//! point when the images coincide). Continuity is automatic. On construction
//! the map is refined into a *cell* structure — a subdivision of every edge
//! on which the map is affine into a single image edge — and monotonicity
//! (connectedness of every point preimage) is decided exactly on it.

use crate::scalar::Scalar;
use crate::subtree::SubTree;
use crate::tree::{EdgeId, MetricTree, Pos, TreeError, TreePoint, VertexId};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum MapError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("expected one image per vertex ({want}), got {got}")]
    WrongImageCount { want: usize, got: usize },
    #[error("operation requires a monotone map")]
    NotMonotone,
    #[error("cell budget exceeded while composing: {cells} cells (budget {budget})")]
    CellBudget { cells: usize, budget: usize },
}

/// Affine piece of the map: domain `[lo, hi]` on `edge` (offsets), image
/// either a single point or an affine sweep of one image edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell<S> {
    pub edge: EdgeId,
    pub lo: S,
    pub hi: S,
    pub image: CellImage<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellImage<S> {
    Point(TreePoint<S>),
    Seg { edge: EdgeId, at_lo: S, at_hi: S },
}

impl<S: Scalar> Cell<S> {
    /// Image offset of domain offset `t` (only for `Seg` images).
    fn seg_value(&self, t: &S) -> Option<(EdgeId, S)> {
        match &self.image {
            CellImage::Point(_) => None,
            CellImage::Seg { edge, at_lo, at_hi } => {
                let span = self.hi.clone() - self.lo.clone();
                let off = at_lo.clone()
                    + (t.clone() - self.lo.clone()) * (at_hi.clone() - at_lo.clone()) / span;
                Some((*edge, off))
            }
        }
    }
}

/// Cell structure of a map or of an iterated composition.
#[derive(Debug, Clone)]
pub struct CellMap<S> {
    cells: Vec<Cell<S>>,
    /// Per edge: index range into `cells`, sorted by `lo`.
    edge_ranges: Vec<(usize, usize)>,
}

impl<S: Scalar> CellMap<S> {
    fn build(tree: &MetricTree<S>, mut cells: Vec<Cell<S>>) -> Self {
        cells.sort_by(|a, b| {
            a.edge
                .cmp(&b.edge)
                .then_with(|| a.lo.partial_cmp(&b.lo).expect("comparable"))
        });
        let mut edge_ranges = vec![(0, 0); tree.edge_count()];
        let mut i = 0;
        while i < cells.len() {
            let e = cells[i].edge;
            let start = i;
            while i < cells.len() && cells[i].edge == e {
                i += 1;
            }
            edge_ranges[e] = (start, i);
        }
        CellMap { cells, edge_ranges }
    }

    pub fn cells(&self) -> &[Cell<S>] {
        &self.cells
    }

    pub fn cells_on_edge(&self, e: EdgeId) -> &[Cell<S>] {
        let (a, b) = self.edge_ranges[e];
        &self.cells[a..b]
    }

    /// Evaluates the cell structure at an inner edge point, reporting the
    /// global index of the cell used.
    fn eval_inner(&self, tree: &MetricTree<S>, edge: EdgeId, t: &S) -> (TreePoint<S>, usize) {
        let (start, _) = self.edge_ranges[edge];
        for (k, cell) in self.cells_on_edge(edge).iter().enumerate() {
            if *t >= cell.lo && *t <= cell.hi {
                let p = match &cell.image {
                    CellImage::Point(p) => p.clone(),
                    CellImage::Seg { .. } => {
                        let (e_img, off) = cell.seg_value(t).expect("seg image");
                        tree.point_on_edge(e_img, off).expect("image offset in range")
                    }
                };
                return (p, start + k);
            }
        }
        unreachable!("cells cover every edge");
    }
}

/// Witness that a map is not monotone: a target point with two separated
/// preimage components.
#[derive(Debug, Clone)]
pub struct MonotoneWitness<S> {
    pub target: TreePoint<S>,
    pub preimage_a: TreePoint<S>,
    pub preimage_b: TreePoint<S>,
}

/// Piecewise-linear self-map defined by vertex images.
#[derive(Debug, Clone)]
pub struct PLSelfMap<S> {
    tree: MetricTree<S>,
    images: Vec<TreePoint<S>>,
    cells: CellMap<S>,
    witness: Option<MonotoneWitness<S>>,
}

impl<S: Scalar> PLSelfMap<S> {
    pub fn new(tree: MetricTree<S>, images: Vec<TreePoint<S>>) -> Result<Self, MapError> {
        if images.len() != tree.vertex_count() {
            return Err(MapError::WrongImageCount {
                want: tree.vertex_count(),
                got: images.len(),
            });
        }
        for p in &images {
            tree.check_host(p)?;
        }
        let cells = build_cells(&tree, &images)?;
        let witness = decide_monotone(&tree, &cells);
        Ok(PLSelfMap {
            tree,
            images,
            cells,
            witness,
        })
    }

    pub fn tree(&self) -> &MetricTree<S> {
        &self.tree
    }

    pub fn vertex_image(&self, v: VertexId) -> &TreePoint<S> {
        &self.images[v]
    }

    pub fn vertex_images(&self) -> &[TreePoint<S>] {
        &self.images
    }

    pub fn cell_map(&self) -> &CellMap<S> {
        &self.cells
    }

    pub fn is_monotone(&self) -> bool {
        self.witness.is_none()
    }

    pub fn monotone_witness(&self) -> Option<&MonotoneWitness<S>> {
        self.witness.as_ref()
    }

    pub fn require_monotone(&self) -> Result<(), MapError> {
        if self.is_monotone() {
            Ok(())
        } else {
            Err(MapError::NotMonotone)
        }
    }

    /// Exact image of a point.
    pub fn evaluate(&self, p: &TreePoint<S>) -> Result<TreePoint<S>, MapError> {
        Ok(self.evaluate_traced(p)?.0)
    }

    /// Exact image plus the global index of the cell used (None at vertices).
    pub fn evaluate_traced(
        &self,
        p: &TreePoint<S>,
    ) -> Result<(TreePoint<S>, Option<usize>), MapError> {
        self.tree.check_host(p)?;
        Ok(match p.pos() {
            Pos::Vertex(v) => (self.images[*v].clone(), None),
            Pos::Inner { edge, offset } => {
                let (q, cell) = self.cells.eval_inner(&self.tree, *edge, offset);
                (q, Some(cell))
            }
        })
    }

    /// `f^n(p)` by repeated evaluation.
    pub fn iterate(&self, p: &TreePoint<S>, n: usize) -> Result<TreePoint<S>, MapError> {
        let mut x = p.clone();
        for _ in 0..n {
            x = self.evaluate(&x)?;
        }
        Ok(x)
    }

    /// Rebuilds the map over another scalar type (used to lower exact maps
    /// to f64 for long evidence-grade scans). The monotonicity verdict is
    /// inherited from this map: it was decided exactly and rounding must
    /// not flip it.
    pub fn map_scalar<T: Scalar>(
        &self,
        f: &impl Fn(&S) -> T,
    ) -> (MetricTree<T>, PLSelfMap<T>) {
        let tree_t = self.tree.map_scalar(f);
        let images = self
            .images
            .iter()
            .map(|p| {
                self.tree
                    .convert_point(&tree_t, p, f)
                    .expect("image converts")
            })
            .collect();
        let mut map = PLSelfMap::new(tree_t.clone(), images).expect("converted map stays valid");
        map.witness = self.witness.as_ref().map(|w| MonotoneWitness {
            target: self
                .tree
                .convert_point(&tree_t, &w.target, f)
                .expect("witness converts"),
            preimage_a: self
                .tree
                .convert_point(&tree_t, &w.preimage_a, f)
                .expect("witness converts"),
            preimage_b: self
                .tree
                .convert_point(&tree_t, &w.preimage_b, f)
                .expect("witness converts"),
        });
        (tree_t, map)
    }

    /// Exact preimage connectivity check at one target point; `Some` carries
    /// two points from different preimage components.
    pub fn preimage_witness_at(
        &self,
        y: &TreePoint<S>,
    ) -> Result<Option<MonotoneWitness<S>>, MapError> {
        self.tree.check_host(y)?;
        Ok(disconnected_preimage(&self.tree, &self.cells, y))
    }

    /// Exact invertibility check: no collapsed cells, and the image
    /// segments tile every edge with no gap or overlap.
    pub fn is_cellwise_bijective(&self) -> bool {
        let mut covers: Vec<Vec<(S, S)>> = vec![Vec::new(); self.tree.edge_count()];
        for cell in self.cells.cells() {
            match &cell.image {
                CellImage::Point(_) => return false,
                CellImage::Seg { edge, at_lo, at_hi } => {
                    let (mn, mx) = if at_lo < at_hi {
                        (at_lo.clone(), at_hi.clone())
                    } else {
                        (at_hi.clone(), at_lo.clone())
                    };
                    covers[*edge].push((mn, mx));
                }
            }
        }
        for (e, segs) in covers.iter_mut().enumerate() {
            segs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("comparable"));
            let len = &self.tree.edge(e).len;
            let mut cursor = S::zero();
            for (mn, mx) in segs.iter() {
                if *mn != cursor {
                    return false;
                }
                cursor = mx.clone();
            }
            if cursor != *len {
                return false;
            }
        }
        true
    }

    /// Exact image of a subtree, computed interval-wise (independent of the
    /// endpoint-hull shortcut valid for monotone maps).
    pub fn image_of_subtree(&self, sub: &SubTree<S>) -> Result<SubTree<S>, MapError> {
        let tree = &self.tree;
        if sub.host_id() != tree.id() {
            return Err(TreeError::HostMismatch.into());
        }
        let mut intervals: Vec<Option<(S, S)>> = vec![None; tree.edge_count()];
        let mut vin = vec![false; tree.vertex_count()];
        let mark_point = |p: &TreePoint<S>,
                              intervals: &mut Vec<Option<(S, S)>>,
                              vin: &mut Vec<bool>| match p.pos() {
            Pos::Vertex(w) => vin[*w] = true,
            Pos::Inner { edge, offset } => {
                merge_interval(intervals, *edge, offset.clone(), offset.clone())
            }
        };
        for (e, iv) in sub.intervals().iter().enumerate() {
            let Some((a, b)) = iv else { continue };
            if a == b {
                let q = self.evaluate(&tree.point_on_edge(e, a.clone())?)?;
                mark_point(&q, &mut intervals, &mut vin);
                continue;
            }
            for cell in self.cells.cells_on_edge(e) {
                let c1 = if cell.lo > *a { cell.lo.clone() } else { a.clone() };
                let c2 = if cell.hi < *b { cell.hi.clone() } else { b.clone() };
                if c1 > c2 {
                    continue;
                }
                match &cell.image {
                    CellImage::Point(q) => mark_point(q, &mut intervals, &mut vin),
                    CellImage::Seg { edge: e2, .. } => {
                        let (_, o1) = cell.seg_value(&c1).expect("seg");
                        let (_, o2) = cell.seg_value(&c2).expect("seg");
                        let (lo, hi) = if o1 < o2 { (o1, o2) } else { (o2, o1) };
                        merge_interval(&mut intervals, *e2, lo, hi);
                    }
                }
            }
        }
        for v in 0..tree.vertex_count() {
            if sub.contains_vertex(v) {
                let q = self.images[v].clone();
                mark_point(&q, &mut intervals, &mut vin);
            }
        }
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
        Ok(SubTree::from_intervals(tree, intervals, vin))
    }
}

fn merge_interval<S: Scalar>(intervals: &mut [Option<(S, S)>], e: EdgeId, lo: S, hi: S) {
    intervals[e] = Some(match intervals[e].take() {
        None => (lo, hi),
        Some((a, b)) => (
            if lo < a { lo } else { a },
            if hi > b { hi } else { b },
        ),
    });
}

fn build_cells<S: Scalar>(
    tree: &MetricTree<S>,
    images: &[TreePoint<S>],
) -> Result<CellMap<S>, MapError> {
    let mut cells = Vec::new();
    for (e, edge) in tree.edges().iter().enumerate() {
        let a = &images[edge.u];
        let b = &images[edge.v];
        if a == b {
            cells.push(Cell {
                edge: e,
                lo: S::zero(),
                hi: edge.len.clone(),
                image: CellImage::Point(a.clone()),
            });
            continue;
        }
        let arc = tree.arc(a, b)?;
        let alen = arc.length().clone();
        let mut cum = S::zero();
        for seg in arc.segments() {
            let seglen = (seg.to.clone() - seg.from.clone()).abs();
            let lo = cum.clone() * edge.len.clone() / alen.clone();
            cum = cum + seglen;
            let hi = cum.clone() * edge.len.clone() / alen.clone();
            cells.push(Cell {
                edge: e,
                lo,
                hi,
                image: CellImage::Seg {
                    edge: seg.edge,
                    at_lo: seg.from.clone(),
                    at_hi: seg.to.clone(),
                },
            });
        }
    }
    Ok(CellMap::build(tree, cells))
}

/// Preimage piece of one target point within one cell.
#[derive(Debug, Clone)]
enum Piece<S> {
    Point(TreePoint<S>),
    Segment {
        lo_pt: TreePoint<S>,
        hi_pt: TreePoint<S>,
    },
}

impl<S: Scalar> Piece<S> {
    fn contacts(&self) -> Vec<&TreePoint<S>> {
        match self {
            Piece::Point(p) => vec![p],
            Piece::Segment { lo_pt, hi_pt, .. } => vec![lo_pt, hi_pt],
        }
    }

    fn representative(&self) -> TreePoint<S> {
        match self {
            Piece::Point(p) => p.clone(),
            Piece::Segment { lo_pt, .. } => lo_pt.clone(),
        }
    }
}

/// Exact monotonicity decision. The preimage connectivity pattern is
/// piecewise constant over the image subdivision, so testing every image
/// breakpoint and one interior witness per image cell decides the general
/// case (see docs/algorithms.md; the dense-sampling oracle in the test
/// suite cross-checks this).
fn decide_monotone<S: Scalar>(
    tree: &MetricTree<S>,
    cells: &CellMap<S>,
) -> Option<MonotoneWitness<S>> {
    let mut targets: Vec<TreePoint<S>> = Vec::new();
    // Cut vertices first: folds typically identify neighborhoods of
    // subdivision vertices, so these yield the informative witnesses.
    let mut vertices: Vec<usize> = (0..tree.vertex_count()).collect();
    vertices.sort_by_key(|&v| (std::cmp::Reverse(tree.degree(v)), v));
    for v in vertices {
        targets.push(tree.vertex(v).expect("vertex"));
    }
    for e in 0..tree.edge_count() {
        let len = &tree.edge(e).len;
        let mut breaks: Vec<S> = vec![S::zero(), len.clone()];
        for cell in cells.cells() {
            match &cell.image {
                CellImage::Point(p) => {
                    if let Pos::Inner { edge, offset } = p.pos() {
                        if *edge == e {
                            breaks.push(offset.clone());
                        }
                    }
                }
                CellImage::Seg { edge, at_lo, at_hi } => {
                    if *edge == e {
                        breaks.push(at_lo.clone());
                        breaks.push(at_hi.clone());
                    }
                }
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
        breaks.dedup();
        let two = S::from_ratio(2, 1);
        for w in breaks.windows(2) {
            let mid = (w[0].clone() + w[1].clone()) / two.clone();
            targets.push(tree.point_on_edge(e, mid).expect("interior"));
        }
        for t in breaks {
            if t > S::zero() && t < *len {
                targets.push(tree.point_on_edge(e, t).expect("interior"));
            }
        }
    }

    for y in &targets {
        if let Some(w) = disconnected_preimage(tree, cells, y) {
            return Some(w);
        }
    }
    None
}

/// Collects the exact preimage of `y` as points/segments and checks whether
/// they form a connected subset of the tree.
fn disconnected_preimage<S: Scalar>(
    tree: &MetricTree<S>,
    cells: &CellMap<S>,
    y: &TreePoint<S>,
) -> Option<MonotoneWitness<S>> {
    let mut pieces: Vec<Piece<S>> = Vec::new();
    for cell in cells.cells() {
        match &cell.image {
            CellImage::Point(p) => {
                if p == y {
                    let lo_pt = tree.point_on_edge(cell.edge, cell.lo.clone()).expect("offset");
                    let hi_pt = tree.point_on_edge(cell.edge, cell.hi.clone()).expect("offset");
                    pieces.push(Piece::Segment { lo_pt, hi_pt });
                }
            }
            CellImage::Seg { edge, at_lo, at_hi } => {
                let y_off: Option<S> = match y.pos() {
                    Pos::Inner { edge: ey, offset } if ey == edge => Some(offset.clone()),
                    Pos::Vertex(w) => tree.vertex_offset_on_edge(*w, *edge),
                    _ => None,
                };
                let Some(y_off) = y_off else { continue };
                let (mn, mx) = if at_lo < at_hi {
                    (at_lo, at_hi)
                } else {
                    (at_hi, at_lo)
                };
                if y_off < *mn || y_off > *mx {
                    continue;
                }
                let span = at_hi.clone() - at_lo.clone();
                let t = cell.lo.clone()
                    + (y_off - at_lo.clone()) * (cell.hi.clone() - cell.lo.clone()) / span;
                let p = tree.point_on_edge(cell.edge, t).expect("offset in cell");
                pieces.push(Piece::Point(p));
            }
        }
    }
    if pieces.len() <= 1 {
        return None;
    }
    // Union-find over pieces; two pieces touch iff they share a canonical
    // point (cells have disjoint interiors, so contacts happen at ends).
    let mut contact_points: Vec<TreePoint<S>> = Vec::new();
    for piece in &pieces {
        for c in piece.contacts() {
            contact_points.push(c.clone());
        }
    }
    contact_points.sort_by(|a, b| tree.cmp_points(a, b));
    contact_points.dedup();
    let index_of = |p: &TreePoint<S>| {
        contact_points
            .binary_search_by(|c| tree.cmp_points(c, p))
            .expect("contact present")
    };
    let mut parent: Vec<usize> = (0..pieces.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let mut owner: Vec<Option<usize>> = vec![None; contact_points.len()];
    for (i, piece) in pieces.iter().enumerate() {
        for c in piece.contacts() {
            let k = index_of(c);
            match owner[k] {
                None => owner[k] = Some(i),
                Some(j) => {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..pieces.len())
        .map(|i| find(&mut parent, i))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    if roots.len() <= 1 {
        return None;
    }
    let first = pieces
        .iter()
        .enumerate()
        .find(|(i, _)| find(&mut parent, *i) == roots[0])
        .map(|(_, p)| p.representative())
        .expect("root has member");
    let second = pieces
        .iter()
        .enumerate()
        .find(|(i, _)| find(&mut parent, *i) == roots[1])
        .map(|(_, p)| p.representative())
        .expect("root has member");
    Some(MonotoneWitness {
        target: y.clone(),
        preimage_a: first,
        preimage_b: second,
    })
}

/// Monotonicity decision for an arbitrary cell structure (used to check
/// iterated compositions).
pub fn cells_monotone_witness<S: Scalar>(
    tree: &MetricTree<S>,
    cells: &CellMap<S>,
) -> Option<MonotoneWitness<S>> {
    decide_monotone(tree, cells)
}

/// Cells of `f ∘ base` (i.e. apply `base` first, then one more step of `f`).
pub fn compose_cells<S: Scalar>(
    base: &CellMap<S>,
    f: &PLSelfMap<S>,
    budget: usize,
) -> Result<CellMap<S>, MapError> {
    let tree = f.tree();
    let mut out: Vec<Cell<S>> = Vec::new();
    for cell in base.cells() {
        match &cell.image {
            CellImage::Point(p) => {
                out.push(Cell {
                    edge: cell.edge,
                    lo: cell.lo.clone(),
                    hi: cell.hi.clone(),
                    image: CellImage::Point(f.evaluate(p)?),
                });
            }
            CellImage::Seg { edge, at_lo, at_hi } => {
                let (mn, mx) = if at_lo < at_hi {
                    (at_lo.clone(), at_hi.clone())
                } else {
                    (at_hi.clone(), at_lo.clone())
                };
                let span_img = at_hi.clone() - at_lo.clone();
                let span_dom = cell.hi.clone() - cell.lo.clone();
                for fc in f.cells.cells_on_edge(*edge) {
                    let c1 = if fc.lo > mn { fc.lo.clone() } else { mn.clone() };
                    let c2 = if fc.hi < mx { fc.hi.clone() } else { mx.clone() };
                    if c1 >= c2 {
                        continue;
                    }
                    // Pull the clipped image range back to domain offsets.
                    let t = |x: &S| {
                        cell.lo.clone()
                            + (x.clone() - at_lo.clone()) * span_dom.clone() / span_img.clone()
                    };
                    let (d1, d2) = (t(&c1), t(&c2));
                    let (lo, hi, x_lo, x_hi) = if d1 < d2 {
                        (d1, d2, c1.clone(), c2.clone())
                    } else {
                        (d2, d1, c2.clone(), c1.clone())
                    };
                    let image = match &fc.image {
                        CellImage::Point(q) => CellImage::Point(q.clone()),
                        CellImage::Seg { .. } => {
                            let (e2, o1) = fc.seg_value(&x_lo).expect("seg");
                            let (_, o2) = fc.seg_value(&x_hi).expect("seg");
                            CellImage::Seg {
                                edge: e2,
                                at_lo: o1,
                                at_hi: o2,
                            }
                        }
                    };
                    out.push(Cell {
                        edge: cell.edge,
                        lo,
                        hi,
                        image,
                    });
                    if out.len() > budget {
                        return Err(MapError::CellBudget {
                            cells: out.len(),
                            budget,
                        });
                    }
                }
            }
        }
    }
    Ok(CellMap::build(tree, out))
}

/// Fixed points of a cell structure: isolated solutions plus pointwise-fixed
/// cells (vertex fixed points are found by direct evaluation in the caller).
pub fn cell_fixed_points<S: Scalar>(
    tree: &MetricTree<S>,
    cm: &CellMap<S>,
) -> (Vec<TreePoint<S>>, Vec<(EdgeId, S, S)>) {
    let mut isolated = Vec::new();
    let mut pointwise = Vec::new();
    for cell in cm.cells() {
        match &cell.image {
            CellImage::Point(p) => {
                let off = match p.pos() {
                    Pos::Inner { edge, offset } if *edge == cell.edge => Some(offset.clone()),
                    Pos::Vertex(w) => tree.vertex_offset_on_edge(*w, cell.edge),
                    _ => None,
                };
                if let Some(off) = off {
                    if off >= cell.lo && off <= cell.hi {
                        isolated.push(p.clone());
                    }
                }
            }
            CellImage::Seg { edge, at_lo, at_hi } => {
                if *edge != cell.edge {
                    continue;
                }
                let span = cell.hi.clone() - cell.lo.clone();
                let k = (at_hi.clone() - at_lo.clone()) / span;
                if k == S::one() {
                    if *at_lo == cell.lo {
                        pointwise.push((cell.edge, cell.lo.clone(), cell.hi.clone()));
                    }
                    continue;
                }
                let t = (at_lo.clone() - cell.lo.clone() * k.clone()) / (S::one() - k);
                if t >= cell.lo && t <= cell.hi {
                    isolated.push(tree.point_on_edge(cell.edge, t).expect("in range"));
                }
            }
        }
    }
    isolated.sort_by(|a, b| tree.cmp_points(a, b));
    isolated.dedup();
    (isolated, pointwise)
}

/// A solved periodic point with its minimal period.
#[derive(Debug, Clone)]
pub struct PeriodicPoint<S> {
    pub point: TreePoint<S>,
    pub period: usize,
}

/// Result of the periodic-point solver.
#[derive(Debug, Clone)]
pub struct PeriodicReport<S> {
    pub points: Vec<PeriodicPoint<S>>,
    /// Pointwise-fixed cells of `f^m`: `(m, edge, lo, hi, representative period)`.
    pub pointwise_cells: Vec<PointwiseCell<S>>,
}

#[derive(Debug, Clone)]
pub struct PointwiseCell<S> {
    pub iterate: usize,
    pub edge: EdgeId,
    pub lo: S,
    pub hi: S,
    pub representative: TreePoint<S>,
    pub representative_period: usize,
}

impl<S: Scalar> PeriodicReport<S> {
    /// All solved points (cell representatives included).
    pub fn all_points(&self) -> impl Iterator<Item = (&TreePoint<S>, usize)> {
        self.points
            .iter()
            .map(|p| (&p.point, p.period))
            .chain(
                self.pointwise_cells
                    .iter()
                    .map(|c| (&c.representative, c.representative_period)),
            )
    }

    /// Exact distance from `p` to the solved periodic set, with
    /// pointwise-fixed cells counted as whole segments.
    pub fn distance_to_solutions(
        &self,
        tree: &MetricTree<S>,
        p: &TreePoint<S>,
    ) -> Result<S, MapError> {
        let mut best: Option<S> = None;
        let consider = |d: S, best: &mut Option<S>| {
            if best.as_ref().is_none_or(|b| d < *b) {
                *best = Some(d);
            }
        };
        for pp in &self.points {
            consider(tree.distance(p, &pp.point)?, &mut best);
        }
        for c in &self.pointwise_cells {
            let same_edge_offset = match p.pos() {
                Pos::Inner { edge, offset } if *edge == c.edge => Some(offset.clone()),
                Pos::Vertex(w) => tree.vertex_offset_on_edge(*w, c.edge),
                _ => None,
            };
            let d = if let Some(t) = same_edge_offset {
                if t < c.lo {
                    c.lo.clone() - t
                } else if t > c.hi {
                    t - c.hi.clone()
                } else {
                    S::zero()
                }
            } else {
                let lo_pt = tree.point_on_edge(c.edge, c.lo.clone())?;
                let hi_pt = tree.point_on_edge(c.edge, c.hi.clone())?;
                let d1 = tree.distance(p, &lo_pt)?;
                let d2 = tree.distance(p, &hi_pt)?;
                if d1 < d2 {
                    d1
                } else {
                    d2
                }
            };
            consider(d, &mut best);
        }
        Ok(best.unwrap_or_else(|| tree.total_length() + S::one()))
    }
}

/// Solves `f^m(x) = x` per cell for every `m <= max_period`.
pub fn periodic_points<S: Scalar>(
    f: &PLSelfMap<S>,
    max_period: usize,
    budget: usize,
) -> Result<PeriodicReport<S>, MapError> {
    let tree = f.tree();
    let mut report = PeriodicReport {
        points: Vec::new(),
        pointwise_cells: Vec::new(),
    };
    let minimal_period = |p: &TreePoint<S>, m: usize| -> Result<usize, MapError> {
        for d in 1..=m {
            if m.is_multiple_of(d) && f.iterate(p, d)? == *p {
                return Ok(d);
            }
        }
        Ok(m)
    };
    let mut cm = f.cell_map().clone();
    for m in 1..=max_period {
        if m > 1 {
            cm = compose_cells(&cm, f, budget)?;
        }
        let (mut isolated, pointwise) = cell_fixed_points(tree, &cm);
        for v in 0..tree.vertex_count() {
            let pv = tree.vertex(v)?;
            if f.iterate(&pv, m)? == pv {
                isolated.push(pv);
            }
        }
        isolated.sort_by(|a, b| tree.cmp_points(a, b));
        isolated.dedup();
        for p in isolated {
            if report.points.iter().any(|q| q.point == p) {
                continue;
            }
            let in_pointwise = report.pointwise_cells.iter().any(|c| {
                matches!(p.pos(), Pos::Inner { edge, offset } if *edge == c.edge && *offset >= c.lo && *offset <= c.hi)
            });
            if in_pointwise {
                continue;
            }
            let period = minimal_period(&p, m)?;
            report.points.push(PeriodicPoint { point: p, period });
        }
        for (edge, lo, hi) in pointwise {
            let already = report
                .pointwise_cells
                .iter()
                .any(|c| c.edge == edge && c.lo <= lo && hi <= c.hi);
            if already {
                continue;
            }
            let third = lo.clone() + (hi.clone() - lo.clone()) / S::from_ratio(3, 1);
            let representative = tree.point_on_edge(edge, third)?;
            let representative_period = minimal_period(&representative, m)?;
            report.pointwise_cells.push(PointwiseCell {
                iterate: m,
                edge,
                lo,
                hi,
                representative,
                representative_period,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::testutil::{contraction_map, identity_map, reflection_map, tent_map, unit_interval};

    #[test]
    fn evaluate_at_vertices_matches_table() {
        let t = unit_interval();
        let f = reflection_map(&t);
        assert_eq!(f.evaluate(&t.vertex(0).unwrap()).unwrap(), t.vertex(1).unwrap());
    }

    #[test]
    fn evaluate_identity_keeps_points() {
        let t = unit_interval();
        let f = identity_map(&t);
        let p = t.point_on_edge(0, rat(1, 3)).unwrap();
        assert_eq!(f.evaluate(&p).unwrap(), p);
    }

    #[test]
    fn evaluate_reflection_flips_offsets() {
        let t = unit_interval();
        let f = reflection_map(&t);
        let p = t.point_on_edge(0, rat(3, 10)).unwrap();
        assert_eq!(
            f.evaluate(&p).unwrap(),
            t.point_on_edge(0, rat(7, 10)).unwrap()
        );
    }

    #[test]
    fn identity_and_reflection_are_monotone() {
        let t = unit_interval();
        assert!(identity_map(&t).is_monotone());
        assert!(reflection_map(&t).is_monotone());
        assert!(contraction_map(&t).is_monotone());
    }

    #[test]
    fn tent_map_is_not_monotone_with_midpoint_witness() {
        let f = tent_map();
        assert!(!f.is_monotone());
        let t = f.tree();
        // Whatever witness the decision picked must be genuine.
        let w = f.monotone_witness().unwrap();
        assert_ne!(w.preimage_a, w.preimage_b);
        assert_eq!(f.evaluate(&w.preimage_a).unwrap(), w.target);
        assert_eq!(f.evaluate(&w.preimage_b).unwrap(), w.target);
        // The fold at the midpoint: preimage of 1/2 is {1/4, 3/4}.
        let mid = t.vertex(1).unwrap();
        let w2 = f.preimage_witness_at(&mid).unwrap().unwrap();
        let quarter = t.point_on_edge(0, rat(1, 4)).unwrap();
        let three_quarters = t.point_on_edge(1, rat(1, 4)).unwrap();
        let got = [w2.preimage_a.clone(), w2.preimage_b.clone()];
        assert!(got.contains(&quarter) && got.contains(&three_quarters));
    }

    #[test]
    fn periodic_points_of_identity_are_pointwise_cells() {
        let t = unit_interval();
        let rep = periodic_points(&identity_map(&t), 1, 10_000).unwrap();
        assert_eq!(rep.pointwise_cells.len(), 1);
        assert_eq!(rep.pointwise_cells[0].representative_period, 1);
    }

    #[test]
    fn periodic_points_of_reflection() {
        let t = unit_interval();
        let rep = periodic_points(&reflection_map(&t), 2, 10_000).unwrap();
        let fixed: Vec<_> = rep.points.iter().filter(|p| p.period == 1).collect();
        assert_eq!(fixed.len(), 1);
        assert_eq!(fixed[0].point, t.point_on_edge(0, rat(1, 2)).unwrap());
        // Everything else is pointwise period 2.
        assert!(rep
            .pointwise_cells
            .iter()
            .any(|c| c.iterate == 2 && c.representative_period == 2));
    }

    #[test]
    fn periodic_points_of_contraction_is_only_zero() {
        let t = unit_interval();
        let rep = periodic_points(&contraction_map(&t), 3, 10_000).unwrap();
        assert!(rep.pointwise_cells.is_empty());
        assert_eq!(rep.points.len(), 1);
        assert_eq!(rep.points[0].point, t.vertex(0).unwrap());
        assert_eq!(rep.points[0].period, 1);
    }

    #[test]
    fn image_of_subtree_matches_endpoint_hull_for_monotone() {
        let t = unit_interval();
        let f = reflection_map(&t);
        let sub = SubTree::hull(
            &t,
            &[
                t.point_on_edge(0, rat(1, 5)).unwrap(),
                t.point_on_edge(0, rat(3, 5)).unwrap(),
            ],
        )
        .unwrap();
        let img = f.image_of_subtree(&sub).unwrap();
        let hull_img = SubTree::hull(
            &t,
            &[
                t.point_on_edge(0, rat(2, 5)).unwrap(),
                t.point_on_edge(0, rat(4, 5)).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(img, hull_img);
    }
}
