//! Kernelization for k-Path on graphs with bounded-width decompositions, built on
//! a reduction rule that replaces large regions with small linkage witnesses.

pub mod bounds;
pub mod decomposition;
pub mod error;
pub mod graph;
pub mod harness;
pub mod kernel;
pub mod linkage;
pub mod modulator;
pub mod reduction;
pub mod separation;
mod util;

pub use error::{Error, Result};
pub use graph::{Graph, Path, Separation, VertexId, VertexSet};

/// Exact unbounded count used for the size bounds.
pub type Count = num_bigint::BigUint;
