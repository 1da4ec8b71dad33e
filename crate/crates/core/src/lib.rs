//! Total curvature of graphs embedded in Euclidean space or in a
//! constant-curvature model, cone area densities, and the singularity
//! classes they permit for soap films spanning the graph.

pub mod arc;
pub mod classify;
pub mod cone;
pub mod curvature;
pub mod error;
pub mod examples;
pub mod format;
pub mod graph;
pub mod model;
pub mod hull;
pub mod quadrature;
pub mod search;
pub mod space;
pub mod steiner;

pub use arc::{ArcGeometry, CircularArc, End};
pub use error::{Error, Result};
pub use graph::{EmbeddedGraph, ValidationReport};
pub use quadrature::QuadratureConfig;
pub use space::{ModelSpace, Vec3, Vec4};
