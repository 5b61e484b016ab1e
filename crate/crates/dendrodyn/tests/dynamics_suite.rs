//! Dynamics invariants for monotone maps: arc images, composition,
//! interval rigidity, asymptotic rigidity, endpoint surjection, and the
//! cross-checks between the monotonicity decision and its dense oracle.

mod common;

use dendrodyn::corpus::{
    random_monotone_map, random_path, random_point, random_monotone_interval_map, rng_from_seed,
};
use dendrodyn::dynamics::{
    classify_recurrence, omega_limit, pair_type, PairVerdict, RecurrenceClass,
};
use dendrodyn::plmap::{cells_monotone_witness, compose_cells, periodic_points, PLSelfMap};
use dendrodyn::rat;
use dendrodyn::scalar::Rat;
use dendrodyn::tree::MetricTree;
use num_traits::Zero;
use dendrodyn::subtree::SubTree;
use rand::RngExt;

fn corpus(seed: u64, count: usize) -> Vec<PLSelfMap<Rat>> {
    let mut rng = rng_from_seed(seed);
    (0..count).map(|_| random_monotone_map(&mut rng).map).collect()
}

#[test]
fn monotone_image_of_arc_is_arc_of_images() {
    let mut rng = rng_from_seed(201);
    for f in corpus(11, 12) {
        let tree = f.tree().clone();
        for _ in 0..30 {
            let x = random_point(&mut rng, &tree);
            let y = random_point(&mut rng, &tree);
            let hull = SubTree::hull(&tree, &[x.clone(), y.clone()]).unwrap();
            let image = f.image_of_subtree(&hull).unwrap();
            let fx = f.evaluate(&x).unwrap();
            let fy = f.evaluate(&y).unwrap();
            let expected = SubTree::hull(&tree, &[fx.clone(), fy.clone()]).unwrap();
            assert_eq!(image, expected, "f([x,y]) = [f(x), f(y)]");
            // Dense sample containment.
            let arc = tree.arc(&x, &y).unwrap();
            for k in 0..=16 {
                let s = arc.length().clone() * rat(k, 16);
                let p = arc.point_at(&tree, &s).unwrap();
                let fp = f.evaluate(&p).unwrap();
                assert!(expected.member(&tree, &fp).unwrap());
            }
        }
    }
}

#[test]
fn monotone_maps_compose_monotone() {
    for f in corpus(12, 12) {
        let cells2 = compose_cells(f.cell_map(), &f, 500_000).unwrap();
        assert!(
            cells_monotone_witness(f.tree(), &cells2).is_none(),
            "square of a monotone map must be monotone"
        );
    }
}

#[test]
fn monotone_decision_agrees_with_dense_oracle() {
    // Monotone corpus maps and a known folding map, both cross-checked
    // against a dense grid of preimage queries.
    for f in corpus(13, 8) {
        assert!(f.is_monotone());
        assert!(common::monotone_oracle(&f, 24));
    }
    let tent = dendrodyn::testutil::tent_map();
    assert!(!tent.is_monotone());
    assert!(!common::monotone_oracle(&tent, 24));
    // A fold on a Y-tree: two leaves mapped onto the same arm.
    let t = dendrodyn::testutil::y_tree();
    let fold = PLSelfMap::new(
        t.clone(),
        vec![
            t.vertex(0).unwrap(),
            t.vertex(2).unwrap(),
            t.vertex(1).unwrap(),
            t.vertex(1).unwrap(),
        ],
    )
    .unwrap();
    assert!(!fold.is_monotone());
    assert!(!common::monotone_oracle(&fold, 24));
}

#[test]
fn interval_monotone_omegas_have_at_most_two_points() {
    let mut rng = rng_from_seed(214);
    for _ in 0..25 {
        let v = rng.random_range(4..=8);
        let path = random_path(&mut rng, v);
        let f = random_monotone_interval_map(&mut rng, &path);
        for _ in 0..6 {
            let x = random_point(&mut rng, &path);
            let om = omega_limit(&f, &x, &rat(1, 1_000_000), 10_000).unwrap();
            if om.is_exact() {
                assert!(
                    om.points.len() <= 2,
                    "interval monotone omega-limit must be a fixed point or 2-cycle"
                );
            }
        }
    }
}

#[test]
fn asymptotic_rigidity_for_periodic_pairs() {
    // Distinct periodic points are never asymptotic: their orbit distance
    // cycles through a positive minimum.
    for f in corpus(15, 10) {
        let report = periodic_points(&f, 6, 500_000).unwrap();
        let pts: Vec<_> = report.all_points().map(|(p, _)| p.clone()).collect();
        for i in 0..pts.len().min(6) {
            for j in (i + 1)..pts.len().min(6) {
                let rep = pair_type(&f, &pts[i], &pts[j], &rat(1, 1_000_000), 256).unwrap();
                assert_ne!(
                    rep.verdict,
                    PairVerdict::Asymptotic,
                    "distinct periodic points cannot be asymptotic"
                );
            }
        }
    }
}

#[test]
fn endpoints_of_monotone_images_come_from_endpoints() {
    let mut rng = rng_from_seed(216);
    for f in corpus(16, 10) {
        let tree = f.tree().clone();
        for _ in 0..20 {
            let sub = common::random_subtree(&mut rng, &tree, 4);
            let image = f.image_of_subtree(&sub).unwrap();
            // Endpoint surjection: every endpoint of the image is the image
            // of an endpoint.
            for e in image.endpoints() {
                let found = sub
                    .endpoints()
                    .iter()
                    .any(|s| f.evaluate(s).unwrap() == *e);
                assert!(found, "image endpoint without an endpoint preimage");
            }
            // And the endpoint-hull shortcut agrees with the exact image.
            let imgs: Vec<_> = sub
                .endpoints()
                .iter()
                .map(|p| f.evaluate(p).unwrap())
                .collect();
            let hull = SubTree::hull(&tree, &imgs).unwrap();
            assert_eq!(image, hull);
            assert!(image.endpoints().len() <= sub.endpoints().len());
        }
    }
}

#[test]
fn dense_periodicity_only_for_cellwise_bijections() {
    let mut rng = rng_from_seed(217);
    let eps = rat(1, 1_000_000);
    for f in corpus(17, 14) {
        let tree = f.tree().clone();
        let solved = periodic_points(&f, 8, 500_000).unwrap();
        // Periodic points dense at eps-resolution over a vertex+midpoint grid?
        let mut dense = true;
        'grid: for e in 0..tree.edge_count() {
            let len = tree.edge(e).len.clone();
            for k in 0..=4 {
                let p = tree.point_on_edge(e, len.clone() * rat(k, 4)).unwrap();
                if solved.distance_to_solutions(&tree, &p).unwrap() > eps {
                    dense = false;
                    break 'grid;
                }
            }
        }
        if dense {
            assert!(
                f.is_cellwise_bijective(),
                "dense periodic points require an invertible map"
            );
        }
        let _ = &mut rng;
    }
}

#[test]
fn omega_members_lie_on_solved_periodic_orbits() {
    // The solver is the oracle for resolved omega-limits.
    let mut rng = rng_from_seed(218);
    for f in corpus(18, 8) {
        let tree = f.tree().clone();
        for _ in 0..8 {
            let x = random_point(&mut rng, &tree);
            let om = omega_limit(&f, &x, &rat(1, 1_000_000), 10_000).unwrap();
            if !om.is_exact() {
                continue;
            }
            let period = om.points.len();
            let solved = periodic_points(&f, period.max(1), 500_000).unwrap();
            for p in &om.points {
                assert_eq!(
                    solved.distance_to_solutions(&tree, p).unwrap(),
                    Rat::zero()
                );
            }
            // Strong invariance: the map permutes the omega set exactly.
            let mut imgs: Vec<_> = om
                .points
                .iter()
                .map(|p| f.evaluate(p).unwrap())
                .collect();
            imgs.sort_by(|a, b| tree.cmp_points(a, b));
            let mut want = om.points.clone();
            want.sort_by(|a, b| tree.cmp_points(a, b));
            assert_eq!(imgs, want);
        }
    }
}

#[test]
fn resolver_handles_expanding_transients() {
    // Increasing interval map with an expanding branch (slope 3 on
    // [0, 1/4]) feeding a contracting one (slope 1/3): orbits of small
    // points first expand, then settle toward the fixed endpoint 1.
    let t = MetricTree::new(
        vec!["a".into(), "k".into(), "b".into()],
        vec![(0, 1, rat(1, 4)), (1, 2, rat(3, 4))],
    )
    .unwrap();
    let f = PLSelfMap::new(
        t.clone(),
        vec![
            t.vertex(0).unwrap(),
            t.point_on_edge(1, rat(1, 2)).unwrap(), // global 3/4
            t.vertex(2).unwrap(),
        ],
    )
    .unwrap();
    assert!(f.is_monotone());
    let x = t.point_on_edge(0, rat(1, 100)).unwrap();
    let om = omega_limit(&f, &x, &rat(1, 1_000_000), 10_000).unwrap();
    assert!(om.is_exact());
    assert_eq!(om.points, vec![t.vertex(2).unwrap()]);
}

#[test]
fn rotation_with_rigid_core_resolves_to_the_boundary_orbit() {
    // Three arms of length 1 (vertices at radius 1/2 and 1) glued at a
    // center; the map rotates arms, keeps radius 1/2 fixed and pulls the
    // outer half inward (1 -> 3/4). Any outer point spirals onto the exact
    // period-3 orbit of the radius-1/2 vertices.
    let mut names = vec!["c".to_string()];
    let mut edges = Vec::new();
    for a in 0..3usize {
        names.push(format!("m{a}"));
        names.push(format!("t{a}"));
        let m = 1 + 2 * a;
        let tip = 2 + 2 * a;
        edges.push((0, m, rat(1, 2)));
        edges.push((m, tip, rat(1, 2)));
    }
    let tree = MetricTree::new(names, edges).unwrap();
    let mid = |a: usize| tree.vertex(1 + 2 * a).unwrap();
    let mut images = vec![tree.vertex(0).unwrap()];
    for a in 0..3usize {
        let next = (a + 1) % 3;
        images.push(mid(next));
        // Tip maps to radius 3/4 on the next arm: offset 1/4 past its mid.
        images.push(tree.point_on_edge(2 * next + 1, rat(1, 4)).unwrap());
    }
    let f = PLSelfMap::new(tree.clone(), images).unwrap();
    assert!(f.is_monotone());
    let x = tree.vertex(2).unwrap(); // tip of arm 0
    let om = omega_limit(&f, &x, &rat(1, 1_000_000), 10_000).unwrap();
    assert!(om.is_exact());
    let mut want: Vec<_> = (0..3).map(mid).collect();
    want.sort_by(|a, b| tree.cmp_points(a, b));
    let mut got = om.points.clone();
    got.sort_by(|a, b| tree.cmp_points(a, b));
    assert_eq!(got, want, "omega is exactly the rigid-boundary 3-orbit");
}

#[test]
fn tiny_budget_reports_an_approximation() {
    use dendrodyn::dynamics::{omega_limit_opts, OmegaKind, OmegaOptions};
    let t = dendrodyn::testutil::unit_interval();
    let f = dendrodyn::testutil::contraction_map(&t);
    let x = t.vertex(1).unwrap();
    let opts = OmegaOptions {
        resolve_budget: 1,
        attempt_every: 1,
    };
    let om = omega_limit_opts(&f, &x, &rat(1, 10), 1, &opts).unwrap();
    assert!(matches!(om.kind, OmegaKind::Approximation { .. }));
    assert!(!om.points.is_empty());
}

#[test]
fn recurrence_classes_follow_the_inclusion_chain() {
    // Fixed < Periodic < RegularlyRecurrent: stronger classes win.
    let t = dendrodyn::testutil::unit_interval();
    let f = dendrodyn::testutil::reflection_map(&t);
    let eps = rat(1, 100);
    let fixed = classify_recurrence(&f, &t.point_on_edge(0, rat(1, 2)).unwrap(), &eps, 200, 16)
        .unwrap();
    assert_eq!(fixed.class, RecurrenceClass::Fixed);
    let per = classify_recurrence(&f, &t.point_on_edge(0, rat(1, 4)).unwrap(), &eps, 200, 16)
        .unwrap();
    assert_eq!(per.class, RecurrenceClass::Periodic { period: 2 });
}
