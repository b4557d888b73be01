//! Laman-type graphs, pointed spherical pseudo-tilings, and the
//! self-stress / lifting pipeline on them.

pub mod canon;
pub mod corpus;
pub mod embed;
pub mod graph;
pub mod henneberg;
pub mod lift;
pub mod render;
pub mod report;
pub mod rotation;
pub mod sparsity;
pub mod sphere;
pub mod stress;
pub mod tiling;
