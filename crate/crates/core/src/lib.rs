//! Spectral optimal-design criteria of SLAM pose-graphs.
//!
//! The criteria (T, D, A, E and Ẽ optimality) can be computed from the full
//! Fisher information matrix or, far more cheaply, from a weighted graph
//! Laplacian. The crate offers both routes, dataset I/O, an equivalence
//! benchmark and an active-exploration simulator that scores candidate
//! actions with the Laplacian route.

pub mod bench;
pub mod dataset;
pub mod error;
pub mod explore;
pub mod graph;
pub mod linalg;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Edge, InfoMatrix, LaplacianMatrix, Pose, PoseGraph, Vertex, VertexId};
