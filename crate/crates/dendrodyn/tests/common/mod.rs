//! Shared helpers for the integration suites: independent oracles that
//! deliberately avoid the library's arc/first-point machinery.
#![allow(dead_code, clippy::needless_range_loop)]

use dendrodyn::plmap::PLSelfMap;
use dendrodyn::scalar::{Rat, Scalar};
use dendrodyn::subtree::SubTree;
use dendrodyn::tree::MetricTree;
use rand::{Rng, RngExt};

/// Dense-net brute-force Hausdorff distance between two subtrees, built
/// from the raw vertex-distance matrix only.
pub struct NetOracle {
    vdist: Vec<Vec<f64>>,
    edge_len: Vec<f64>,
    ends: Vec<(usize, usize)>,
}

pub type NetPoint = (usize, f64); // (edge, offset); vertices appear as offsets 0/len

impl NetOracle {
    pub fn new(tree: &MetricTree<Rat>) -> Self {
        let n = tree.vertex_count();
        let mut vdist = vec![vec![0.0; n]; n];
        for u in 0..n {
            for v in 0..n {
                vdist[u][v] = tree.vertex_distance(u, v).approx();
            }
        }
        let edge_len = tree.edges().iter().map(|e| e.len.approx()).collect();
        let ends = tree.edges().iter().map(|e| (e.u, e.v)).collect();
        NetOracle {
            vdist,
            edge_len,
            ends,
        }
    }

    pub fn dist(&self, a: NetPoint, b: NetPoint) -> f64 {
        let (ea, ta) = a;
        let (eb, tb) = b;
        if ea == eb {
            return (ta - tb).abs();
        }
        let (ua, va) = self.ends[ea];
        let (ub, vb) = self.ends[eb];
        let la = self.edge_len[ea];
        let lb = self.edge_len[eb];
        let mut best = f64::INFINITY;
        for (anch_a, off_a) in [(ua, ta), (va, la - ta)] {
            for (anch_b, off_b) in [(ub, tb), (vb, lb - tb)] {
                let d = off_a + self.vdist[anch_a][anch_b] + off_b;
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    pub fn point_as_net(&self, _tree: &MetricTree<Rat>, p: &dendrodyn::tree::TreePoint<Rat>) -> NetPoint {
        match p.pos() {
            dendrodyn::tree::Pos::Vertex(v) => {
                for (e, &(u, w)) in self.ends.iter().enumerate() {
                    if u == *v {
                        return (e, 0.0);
                    }
                    if w == *v {
                        return (e, self.edge_len[e]);
                    }
                }
                unreachable!("every vertex of a tree with edges touches one");
            }
            dendrodyn::tree::Pos::Inner { edge, offset } => (*edge, offset.approx()),
        }
    }

    /// Brute-force Hausdorff estimate between a finite point set and a
    /// subtree, from dense nets only.
    pub fn mixed_hausdorff_estimate(
        &self,
        tree: &MetricTree<Rat>,
        points: &[dendrodyn::tree::TreePoint<Rat>],
        sub: &SubTree<Rat>,
        spacing: f64,
    ) -> f64 {
        let pts: Vec<NetPoint> = points.iter().map(|p| self.point_as_net(tree, p)).collect();
        let net = self.net(sub, spacing);
        let mut from_points: f64 = 0.0;
        for &p in &pts {
            let mut best = f64::INFINITY;
            for &q in &net {
                best = best.min(self.dist(p, q));
            }
            from_points = from_points.max(best);
        }
        let mut from_net: f64 = 0.0;
        for &q in &net {
            let mut best = f64::INFINITY;
            for &p in &pts {
                best = best.min(self.dist(q, p));
            }
            from_net = from_net.max(best);
        }
        from_points.max(from_net)
    }

    /// Net over a subtree's realized interval set at the given spacing.
    pub fn net(&self, sub: &SubTree<Rat>, spacing: f64) -> Vec<NetPoint> {
        let mut out = Vec::new();
        for (e, iv) in sub.intervals().iter().enumerate() {
            let Some((a, b)) = iv else { continue };
            let (a, b) = (a.approx(), b.approx());
            let mut t = a;
            while t < b {
                out.push((e, t));
                t += spacing;
            }
            out.push((e, b));
        }
        if out.is_empty() {
            // Single-vertex subtree: place it on an adjacent edge end.
            for (e, iv) in sub.intervals().iter().enumerate() {
                if let Some((a, _)) = iv {
                    out.push((e, a.approx()));
                }
            }
            if out.is_empty() {
                for v in 0..self.vdist.len() {
                    if sub.contains_vertex(v) {
                        for (e, &(u, w)) in self.ends.iter().enumerate() {
                            if u == v {
                                out.push((e, 0.0));
                                break;
                            }
                            if w == v {
                                out.push((e, self.edge_len[e]));
                                break;
                            }
                        }
                        break;
                    }
                }
            }
        }
        out
    }

    /// Brute-force d_H estimate from dense nets of both subtrees.
    pub fn hausdorff_estimate(
        &self,
        a: &SubTree<Rat>,
        b: &SubTree<Rat>,
        spacing: f64,
    ) -> f64 {
        let na = self.net(a, spacing);
        let nb = self.net(b, spacing);
        let directed = |from: &[NetPoint], to: &[NetPoint]| {
            let mut worst: f64 = 0.0;
            for &p in from {
                let mut best = f64::INFINITY;
                for &q in to {
                    let d = self.dist(p, q);
                    if d < best {
                        best = d;
                    }
                }
                if best > worst {
                    worst = best;
                }
            }
            worst
        };
        directed(&na, &nb).max(directed(&nb, &na))
    }
}

/// Dense-target monotonicity oracle: scans a grid of image points and asks
/// the exact preimage solver at each, instead of only the breakpoint tests
/// the decision procedure uses.
pub fn monotone_oracle(map: &PLSelfMap<Rat>, grid: i64) -> bool {
    let tree = map.tree();
    for v in 0..tree.vertex_count() {
        let y = tree.vertex(v).unwrap();
        if map.preimage_witness_at(&y).unwrap().is_some() {
            return false;
        }
    }
    for e in 0..tree.edge_count() {
        let len = tree.edge(e).len.clone();
        for k in 1..grid {
            let y = tree
                .point_on_edge(e, len.clone() * dendrodyn::rat(k, grid))
                .unwrap();
            if map.preimage_witness_at(&y).unwrap().is_some() {
                return false;
            }
        }
    }
    true
}

/// Random subtree: the hull of a few random points.
pub fn random_subtree(rng: &mut impl Rng, tree: &MetricTree<Rat>, max_pts: usize) -> SubTree<Rat> {
    let k = rng.random_range(1..=max_pts);
    let pts: Vec<_> = (0..k)
        .map(|_| dendrodyn::corpus::random_point(rng, tree))
        .collect();
    SubTree::hull(tree, &pts).unwrap()
}
