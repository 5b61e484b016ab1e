//! Shared fixtures for the unit and integration tests.

use crate::plmap::PLSelfMap;
use crate::scalar::{rat, Rat};
use crate::tree::{interval_tree, MetricTree};

pub fn unit_interval() -> MetricTree<Rat> {
    interval_tree(rat(1, 1))
}

/// Y-tree: center c (index 0), unit edges to leaves a, b, d (1, 2, 3).
pub fn y_tree() -> MetricTree<Rat> {
    MetricTree::new(
        vec!["c".into(), "a".into(), "b".into(), "d".into()],
        vec![(0, 1, rat(1, 1)), (0, 2, rat(1, 1)), (0, 3, rat(1, 1))],
    )
    .unwrap()
}

pub fn identity_map(t: &MetricTree<Rat>) -> PLSelfMap<Rat> {
    let imgs = (0..t.vertex_count()).map(|v| t.vertex(v).unwrap()).collect();
    PLSelfMap::new(t.clone(), imgs).unwrap()
}

/// On the unit interval: 0 -> 1, 1 -> 0.
pub fn reflection_map(t: &MetricTree<Rat>) -> PLSelfMap<Rat> {
    PLSelfMap::new(t.clone(), vec![t.vertex(1).unwrap(), t.vertex(0).unwrap()]).unwrap()
}

/// On the unit interval: 0 -> 0, 1 -> 1/2.
pub fn contraction_map(t: &MetricTree<Rat>) -> PLSelfMap<Rat> {
    PLSelfMap::new(
        t.clone(),
        vec![t.vertex(0).unwrap(), t.point_on_edge(0, rat(1, 2)).unwrap()],
    )
    .unwrap()
}

/// Tent map on `[0,1]` with a subdivision vertex at 1/2: 0 -> 0, 1/2 -> 1, 1 -> 0.
pub fn tent_map() -> PLSelfMap<Rat> {
    let t = MetricTree::new(
        vec!["a".into(), "m".into(), "b".into()],
        vec![(0, 1, rat(1, 2)), (1, 2, rat(1, 2))],
    )
    .unwrap();
    PLSelfMap::new(
        t.clone(),
        vec![t.vertex(0).unwrap(), t.vertex(2).unwrap(), t.vertex(0).unwrap()],
    )
    .unwrap()
}
