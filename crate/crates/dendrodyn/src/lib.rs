//! dendrodyn: exact geometry and dynamics of monotone maps on metric trees,
//! their hyperspace induced maps, adding machines, and the star dendrite
//! example with its separation and chaos certificates.
//!
//! The core is generic over the scalar type ([`scalar::Scalar`]): the
//! rational instantiation decides everything exactly, the `f64` one is used
//! for long evidence-grade orbit statistics. Concrete aliases for the common
//! instantiations live at the crate root.

#![allow(clippy::needless_range_loop, clippy::result_large_err, clippy::type_complexity)]

pub mod corpus;
pub mod dynamics;
pub mod entropy;
pub mod hyper;
pub mod io;
pub mod odometer;
pub mod plmap;
pub mod scalar;
pub mod star;
pub mod subtree;
pub mod tree;

#[doc(hidden)]
pub mod testutil;

pub use scalar::{parse_rat, rat, Rat, Scalar};

/// Exact-rational instantiations: the default working types.
pub type ExactTree = tree::MetricTree<Rat>;
pub type ExactPoint = tree::TreePoint<Rat>;
pub type ExactSubTree = subtree::SubTree<Rat>;
pub type ExactMap = plmap::PLSelfMap<Rat>;
pub type ExactElement = hyper::HyperElement<Rat>;

/// Float instantiations for evidence-grade scans.
pub type FloatTree = tree::MetricTree<f64>;
pub type FloatPoint = tree::TreePoint<f64>;
pub type FloatMap = plmap::PLSelfMap<f64>;
