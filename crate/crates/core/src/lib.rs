//! Exact counting of plane tropical curves through points in general
//! position, with wall-crossing checks of the invariance of the count.

pub mod counting;
pub mod curve;
pub mod graph;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod solver;
pub mod types;
pub mod wallcross;

pub use curve::{Degree, DecoratedGraph, MarkingMap, Stratum};
pub use graph::Graph;
pub use lattice::LatticeVector;
pub use linalg::Q;
pub use solver::PointConfiguration;
pub use types::{CombinatorialType, TypeCatalog, TypeKey};
