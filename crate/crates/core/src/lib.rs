//! Calculus on weighted graphs: vertex and edge measures, edgewise-linear
//! function spaces, graph differential operators, exact isoperimetric
//! constants, Cheeger-type eigenvalue bounds, heat kernels and executable
//! checks of the Sobolev/Nash family of gradient inequalities.

pub mod error;
pub mod fnspace;
pub mod generators;
pub mod graph;
pub mod heat;
pub mod isoperimetry;
pub mod maxflow;
pub mod operators;
pub mod sobolev;
pub mod spectral_bounds;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{build_graph, WeightedGraph};
