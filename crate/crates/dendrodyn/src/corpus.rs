//! Seeded random trees, points, and monotone PL map families.
//!
//! Uniformly random vertex assignments are essentially never monotone, so
//! maps are drawn from constructive families that preserve radial order —
//! pulls toward a root, mirror swaps, arm rotations with a rigid core — and
//! every candidate is still verified by the exact monotonicity decision
//! (and rejected if the check fails).

use crate::plmap::PLSelfMap;
use crate::scalar::{rat, Rat, Scalar};
use crate::tree::{MetricTree, TreePoint};
use num_traits::Zero;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn frac(rng: &mut impl Rng, den: i64) -> Rat {
    rat(rng.random_range(0..=den), den)
}

fn positive_len(rng: &mut impl Rng) -> Rat {
    rat(rng.random_range(1..=8), rng.random_range(1..=4))
}

/// Random tree on `v` vertices by random attachment.
pub fn random_tree(rng: &mut impl Rng, v: usize) -> MetricTree<Rat> {
    assert!(v >= 1);
    let names = (0..v).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::with_capacity(v.saturating_sub(1));
    for i in 1..v {
        let parent = rng.random_range(0..i);
        edges.push((parent, i, positive_len(rng)));
    }
    MetricTree::new(names, edges).expect("attachment trees are valid")
}

/// Path graph on `v` vertices with random edge lengths.
pub fn random_path(rng: &mut impl Rng, v: usize) -> MetricTree<Rat> {
    assert!(v >= 2);
    let names = (0..v).map(|i| format!("v{i}")).collect();
    let edges = (1..v).map(|i| (i - 1, i, positive_len(rng))).collect();
    MetricTree::new(names, edges).expect("paths are valid")
}

/// Random point: occasionally a vertex, otherwise a rational edge offset.
pub fn random_point(rng: &mut impl Rng, tree: &MetricTree<Rat>) -> TreePoint<Rat> {
    if tree.edge_count() == 0 || rng.random_range(0..5) == 0 {
        let v = rng.random_range(0..tree.vertex_count());
        return tree.vertex(v).expect("vertex in range");
    }
    let e = rng.random_range(0..tree.edge_count());
    let len = tree.edge(e).len.clone();
    let offset = len * frac(rng, 16);
    tree.point_on_edge(e, offset).expect("offset in range")
}

/// Monotone map pulling every vertex toward a root along its own root arc,
/// preserving radial order.
pub fn radial_pull(rng: &mut impl Rng, tree: &MetricTree<Rat>) -> PLSelfMap<Rat> {
    let v = tree.vertex_count();
    let root = rng.random_range(0..v);
    let root_pt = tree.vertex(root).expect("root");
    // BFS order from the root so parents are assigned first.
    let mut order = vec![root];
    let mut seen = vec![false; v];
    seen[root] = true;
    let mut parent = vec![root; v];
    let mut qi = 0;
    while qi < order.len() {
        let u = order[qi];
        qi += 1;
        for &(_, w) in tree.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
            }
        }
    }
    let mut radial = vec![Rat::zero(); v];
    let mut images = vec![root_pt.clone(); v];
    for &w in order.iter().skip(1) {
        let depth = tree
            .distance(&root_pt, &tree.vertex(w).expect("vertex"))
            .expect("same host");
        let lo = radial[parent[w]].clone();
        let r = lo.clone() + (depth.clone() - lo) * frac(rng, 8);
        radial[w] = r.clone();
        let arc = tree
            .arc(&root_pt, &tree.vertex(w).expect("vertex"))
            .expect("same host");
        images[w] = arc.point_at(tree, &r).expect("radial position on arc");
    }
    PLSelfMap::new(tree.clone(), images).expect("valid images")
}

/// Monotone interval map: vertex images sorted along the path (orientation
/// flipped by a coin).
pub fn random_monotone_interval_map(
    rng: &mut impl Rng,
    path: &MetricTree<Rat>,
) -> PLSelfMap<Rat> {
    let v = path.vertex_count();
    // Positions along the path from vertex 0.
    let start = path.vertex(0).expect("vertex 0");
    let end = path.vertex(v - 1).expect("last vertex");
    let total = path.distance(&start, &end).expect("same host");
    let arc = path.arc(&start, &end).expect("same host");
    let mut positions: Vec<Rat> = (0..v).map(|_| total.clone() * frac(rng, 16)).collect();
    positions.sort();
    if rng.random_bool(0.5) {
        positions.reverse();
    }
    let images = positions
        .into_iter()
        .map(|s| arc.point_at(path, &s).expect("position on path"))
        .collect();
    PLSelfMap::new(path.clone(), images).expect("valid images")
}

/// A tree made of `arms` identical arms glued at a center, mapped by
/// rotating each arm onto the next; radial positions up to `rigid` arm
/// vertices stay put (rigid core), beyond that they are pulled inward.
/// Produces exact period-`arms` orbits on the rigid core boundary.
pub struct RotationStar {
    pub tree: MetricTree<Rat>,
    pub map: PLSelfMap<Rat>,
    pub arms: usize,
}

pub fn rotation_star(rng: &mut impl Rng, arms: usize, arm_vertices: usize) -> RotationStar {
    assert!(arms >= 2 && arm_vertices >= 1);
    let seg_lens: Vec<Rat> = (0..arm_vertices).map(|_| positive_len(rng)).collect();
    let mut cum = Vec::with_capacity(arm_vertices);
    let mut acc = Rat::zero();
    for l in &seg_lens {
        acc += l.clone();
        cum.push(acc.clone());
    }
    // Radial profile shared by all arms: rigid up to `rigid`, strict pull
    // beyond.
    let rigid = rng.random_range(0..=arm_vertices);
    let mut radial = vec![Rat::zero(); arm_vertices];
    let mut prev = Rat::zero();
    for i in 0..arm_vertices {
        if i < rigid {
            radial[i] = cum[i].clone();
        } else {
            let lo = if prev > Rat::zero() { prev.clone() } else { Rat::zero() };
            radial[i] = lo.clone() + (cum[i].clone() - lo) * frac(rng, 8) * rat(7, 8);
        }
        prev = radial[i].clone();
    }
    // Vertices: 0 = center; arm a vertex i -> 1 + a*arm_vertices + i.
    let v_total = 1 + arms * arm_vertices;
    let names = (0..v_total).map(|i| format!("v{i}")).collect();
    let idx = |a: usize, i: usize| 1 + a * arm_vertices + i;
    let mut edges = Vec::new();
    for a in 0..arms {
        for i in 0..arm_vertices {
            let from = if i == 0 { 0 } else { idx(a, i - 1) };
            edges.push((from, idx(a, i), seg_lens[i].clone()));
        }
    }
    let tree = MetricTree::new(names, edges).expect("star tree is valid");
    let center = tree.vertex(0).expect("center");
    let mut images = vec![center.clone(); v_total];
    for a in 0..arms {
        let next = (a + 1) % arms;
        let tip = tree.vertex(idx(next, arm_vertices - 1)).expect("tip");
        let arc = tree.arc(&center, &tip).expect("same host");
        for i in 0..arm_vertices {
            images[idx(a, i)] = arc.point_at(&tree, &radial[i]).expect("radial on arm");
        }
    }
    let map = PLSelfMap::new(tree.clone(), images).expect("valid images");
    RotationStar { tree, map, arms }
}

/// Mirror tree: two identical copies of a random branch glued at a center
/// (plus an optional pulled tail), mapped by swapping the copies. Produces
/// exact period-2 orbits.
pub fn mirror_map(rng: &mut impl Rng, branch_vertices: usize, tail_vertices: usize) -> PLSelfMap<Rat> {
    rotation_with_tail(rng, 2, branch_vertices, tail_vertices)
}

fn rotation_with_tail(
    rng: &mut impl Rng,
    arms: usize,
    arm_vertices: usize,
    tail_vertices: usize,
) -> PLSelfMap<Rat> {
    let star = rotation_star(rng, arms, arm_vertices);
    if tail_vertices == 0 {
        return star.map;
    }
    // Extend with a tail at the center, pulled toward the center.
    let old = &star.tree;
    let base = old.vertex_count();
    let mut names: Vec<String> = (0..base).map(|i| old.vertex_name(i).to_owned()).collect();
    let mut edges: Vec<(usize, usize, Rat)> = old
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.len.clone()))
        .collect();
    for i in 0..tail_vertices {
        names.push(format!("t{i}"));
        let from = if i == 0 { 0 } else { base + i - 1 };
        edges.push((from, base + i, positive_len(rng)));
    }
    let tree = MetricTree::new(names, edges).expect("tail extension is valid");
    let center = tree.vertex(0).expect("center");
    let mut images = Vec::with_capacity(tree.vertex_count());
    for v in 0..base {
        let img_old = star.map.vertex_image(v);
        images.push(
            old.convert_point(&tree, img_old, &|x: &Rat| x.clone())
                .expect("same layout"),
        );
    }
    let mut prev = Rat::zero();
    for i in 0..tail_vertices {
        let w = tree.vertex(base + i).expect("tail vertex");
        let depth = tree.distance(&center, &w).expect("same host");
        let r = prev.clone() + (depth - prev.clone()) * frac(rng, 8) * rat(3, 4);
        prev = r.clone();
        let arc = tree.arc(&center, &w).expect("same host");
        images.push(arc.point_at(&tree, &r).expect("radial position"));
    }
    PLSelfMap::new(tree, images).expect("valid images")
}

/// One corpus entry: a seeded monotone map with sample points.
pub struct CorpusMap {
    pub map: PLSelfMap<Rat>,
    pub family: &'static str,
}

/// Draws a monotone map, verifying monotonicity and retrying on failure.
pub fn random_monotone_map(rng: &mut impl Rng) -> CorpusMap {
    for _ in 0..64 {
        let (map, family) = match rng.random_range(0..4u32) {
            0 => {
                let v = rng.random_range(5..=10);
                let tree = random_tree(rng, v);
                (radial_pull(rng, &tree), "radial-pull")
            }
            1 => {
                let v = rng.random_range(4..=8);
                let path = random_path(rng, v);
                (random_monotone_interval_map(rng, &path), "interval")
            }
            2 => {
                let branch = rng.random_range(2..=4);
                let tail = rng.random_range(0..=2);
                (mirror_map(rng, branch, tail), "mirror")
            }
            _ => {
                let arms = rng.random_range(2..=4);
                let arm_v = rng.random_range(1..=3);
                let tail = rng.random_range(0..=1);
                (rotation_with_tail(rng, arms, arm_v, tail), "rotation")
            }
        };
        if map.is_monotone() {
            return CorpusMap { map, family };
        }
    }
    unreachable!("constructive families pass the monotonicity check");
}

/// Lowers an exact map and a set of exact points to the f64 instantiation.
pub fn lower_map(
    map: &PLSelfMap<Rat>,
    points: &[TreePoint<Rat>],
) -> (PLSelfMap<f64>, Vec<TreePoint<f64>>) {
    let conv = |x: &Rat| x.approx();
    let (tree_f, map_f) = map.map_scalar(&conv);
    let pts = points
        .iter()
        .map(|p| {
            map.tree()
                .convert_point(&tree_f, p, &conv)
                .expect("point converts")
        })
        .collect();
    (map_f, pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_trees_are_valid_and_seeded() {
        let mut r1 = rng_from_seed(7);
        let mut r2 = rng_from_seed(7);
        let t1 = random_tree(&mut r1, 9);
        let t2 = random_tree(&mut r2, 9);
        assert_eq!(t1.vertex_count(), 9);
        for (a, b) in t1.edges().iter().zip(t2.edges()) {
            assert_eq!((a.u, a.v, &a.len), (b.u, b.v, &b.len));
        }
    }

    #[test]
    fn constructive_families_are_monotone() {
        let mut rng = rng_from_seed(1);
        for _ in 0..20 {
            let c = random_monotone_map(&mut rng);
            assert!(c.map.is_monotone(), "family {}", c.family);
        }
    }

    #[test]
    fn rotation_star_has_periodic_core() {
        let mut rng = rng_from_seed(3);
        let star = rotation_star(&mut rng, 3, 2);
        assert!(star.map.is_monotone());
        // The center is fixed.
        let c = star.tree.vertex(0).unwrap();
        assert_eq!(star.map.evaluate(&c).unwrap(), c);
    }

    #[test]
    fn interval_maps_are_monotone() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let p = random_path(&mut rng, 6);
            let f = random_monotone_interval_map(&mut rng, &p);
            assert!(f.is_monotone());
        }
    }
}
