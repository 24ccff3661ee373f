//! Core library for runtime spatial verification of distributed systems:
//! closure-space models built from trajectory data, a spatial-logic model
//! checker over them, and the in-memory location state the checker reads.

pub mod bitset;
pub mod fixtures;
pub mod ingest;
pub mod model;
pub mod slcs;
pub mod space;
pub mod store;

pub use bitset::PointSet;
pub use model::ClosureModel;
pub use slcs::Formula;
pub use space::{BoundaryVariant, SpaceGraph, SpaceGraphBuilder};
