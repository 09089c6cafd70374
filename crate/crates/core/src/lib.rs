//! Discrete conformal geometry on model grids.

pub mod bubble;
pub mod conformal;
pub mod error;
pub mod grid;
pub mod metric;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{GridManifold, MeshDescriptor, Topology};
