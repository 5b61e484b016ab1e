//! File formats: trees, maps, points and hyperspace elements as JSON, with
//! rationals as exact "p/q" strings. Round-trips are value-exact.

use crate::hyper::HyperElement;
use crate::odometer::{Base, OdoError, OdoPoint};
use crate::plmap::PLSelfMap;
use crate::scalar::{format_rat, parse_rat, Rat};
use crate::subtree::SubTree;
use crate::tree::{MetricTree, Pos, TreePoint};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: field {field}: {message}")]
    Invalid {
        path: String,
        field: String,
        message: String,
    },
}

impl IoError {
    fn invalid(path: &str, field: impl Into<String>, message: impl ToString) -> Self {
        IoError::Invalid {
            path: path.to_owned(),
            field: field.into(),
            message: message.to_string(),
        }
    }
}

/// Tree description file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    pub u: String,
    pub v: String,
    pub len: String,
}

/// Point: a named vertex or an (edge index, offset) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
pub enum PointFile {
    Vertex { vertex: String },
    Edge { edge: usize, offset: String },
}

/// Map description file: inline tree or a path to a tree file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub tree: TreeRef,
    pub vertex_images: BTreeMap<String, PointFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeRef {
    Path(String),
    Inline(TreeFile),
}

/// Hyperspace element: exactly one of the two fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperElementFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_set: Option<Vec<PointFile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subtree: Option<Vec<PointFile>>,
}

/// Odometer state file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdometerFile {
    pub base: Vec<u64>,
    pub point: Vec<u64>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &str, text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn tree_to_file(tree: &MetricTree<Rat>) -> TreeFile {
    TreeFile {
        vertices: (0..tree.vertex_count())
            .map(|v| tree.vertex_name(v).to_owned())
            .collect(),
        edges: tree
            .edges()
            .iter()
            .map(|e| EdgeFile {
                u: tree.vertex_name(e.u).to_owned(),
                v: tree.vertex_name(e.v).to_owned(),
                len: format_rat(&e.len),
            })
            .collect(),
    }
}

pub fn tree_from_file(path: &str, file: &TreeFile) -> Result<MetricTree<Rat>, IoError> {
    let index = |name: &str| {
        file.vertices
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| IoError::invalid(path, "edges", format!("unknown vertex {name:?}")))
    };
    let mut edges = Vec::with_capacity(file.edges.len());
    for e in &file.edges {
        let u = index(&e.u)?;
        let v = index(&e.v)?;
        let len = parse_rat(&e.len).map_err(|err| IoError::invalid(path, "edges.len", err))?;
        edges.push((u, v, len));
    }
    MetricTree::new(file.vertices.clone(), edges)
        .map_err(|err| IoError::invalid(path, "tree", err))
}

pub fn point_to_file(tree: &MetricTree<Rat>, p: &TreePoint<Rat>) -> PointFile {
    match p.pos() {
        Pos::Vertex(v) => PointFile::Vertex {
            vertex: tree.vertex_name(*v).to_owned(),
        },
        Pos::Inner { edge, offset } => PointFile::Edge {
            edge: *edge,
            offset: format_rat(offset),
        },
    }
}

pub fn point_from_file(
    path: &str,
    tree: &MetricTree<Rat>,
    p: &PointFile,
) -> Result<TreePoint<Rat>, IoError> {
    match p {
        PointFile::Vertex { vertex } => {
            let v = tree.vertex_by_name(vertex).ok_or_else(|| {
                IoError::invalid(path, "point.vertex", format!("unknown vertex {vertex:?}"))
            })?;
            tree.vertex(v)
                .map_err(|e| IoError::invalid(path, "point.vertex", e))
        }
        PointFile::Edge { edge, offset } => {
            let off =
                parse_rat(offset).map_err(|e| IoError::invalid(path, "point.offset", e))?;
            tree.point_on_edge(*edge, off)
                .map_err(|e| IoError::invalid(path, "point", e))
        }
    }
}

pub fn load_tree(path: &Path) -> Result<MetricTree<Rat>, IoError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: shown.clone(),
        source,
    })?;
    let file: TreeFile = parse_json(&shown, &text)?;
    tree_from_file(&shown, &file)
}

pub fn map_to_file(map: &PLSelfMap<Rat>) -> MapFile {
    let tree = map.tree();
    let mut vertex_images = BTreeMap::new();
    for v in 0..tree.vertex_count() {
        vertex_images.insert(
            tree.vertex_name(v).to_owned(),
            point_to_file(tree, map.vertex_image(v)),
        );
    }
    MapFile {
        tree: TreeRef::Inline(tree_to_file(tree)),
        vertex_images,
    }
}

/// Loads a map file; a tree path is resolved relative to the map file.
pub fn load_map(path: &Path) -> Result<PLSelfMap<Rat>, IoError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: shown.clone(),
        source,
    })?;
    let file: MapFile = parse_json(&shown, &text)?;
    let tree = match &file.tree {
        TreeRef::Inline(t) => tree_from_file(&shown, t)?,
        TreeRef::Path(rel) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            load_tree(&base.join(rel))?
        }
    };
    map_from_file(&shown, &tree, &file)
}

pub fn map_from_file(
    path: &str,
    tree: &MetricTree<Rat>,
    file: &MapFile,
) -> Result<PLSelfMap<Rat>, IoError> {
    let mut images = Vec::with_capacity(tree.vertex_count());
    for v in 0..tree.vertex_count() {
        let name = tree.vertex_name(v);
        let pf = file.vertex_images.get(name).ok_or_else(|| {
            IoError::invalid(path, "vertex_images", format!("missing image for {name:?}"))
        })?;
        images.push(point_from_file(path, tree, pf)?);
    }
    PLSelfMap::new(tree.clone(), images).map_err(|e| IoError::invalid(path, "vertex_images", e))
}

pub fn element_to_file(tree: &MetricTree<Rat>, e: &HyperElement<Rat>) -> HyperElementFile {
    match e {
        HyperElement::Points(pts) => HyperElementFile {
            finite_set: Some(pts.iter().map(|p| point_to_file(tree, p)).collect()),
            subtree: None,
        },
        HyperElement::Tree(sub) => HyperElementFile {
            finite_set: None,
            subtree: Some(
                sub.endpoints()
                    .iter()
                    .map(|p| point_to_file(tree, p))
                    .collect(),
            ),
        },
    }
}

pub fn element_from_file(
    path: &str,
    tree: &MetricTree<Rat>,
    file: &HyperElementFile,
    limit: usize,
) -> Result<HyperElement<Rat>, IoError> {
    let build_points = |pts: &[PointFile]| -> Result<Vec<TreePoint<Rat>>, IoError> {
        pts.iter().map(|p| point_from_file(path, tree, p)).collect()
    };
    match (&file.finite_set, &file.subtree) {
        (Some(pts), None) => {
            let pts = build_points(pts)?;
            HyperElement::finite_set(tree, &pts, limit)
                .map_err(|e| IoError::invalid(path, "finite_set", e))
        }
        (None, Some(pts)) => {
            let pts = build_points(pts)?;
            let sub = SubTree::hull(tree, &pts)
                .map_err(|e| IoError::invalid(path, "subtree", e))?;
            HyperElement::subtree(sub, limit).map_err(|e| IoError::invalid(path, "subtree", e))
        }
        _ => Err(IoError::invalid(
            path,
            "element",
            "exactly one of finite_set / subtree required",
        )),
    }
}

pub fn odometer_from_file(path: &str, file: &OdometerFile) -> Result<(Base, OdoPoint), IoError> {
    let err = |e: OdoError| IoError::invalid(path, "odometer", e);
    let base = Base::new(file.base.clone()).map_err(err)?;
    let point = base.point(file.point.clone()).map_err(err)?;
    Ok((base, point))
}
