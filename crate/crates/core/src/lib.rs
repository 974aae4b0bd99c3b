//! Grid and path contraction.
//!
//! Decides whether a graph becomes an `r x q` grid after at most `k` edge
//! contractions, with certificates, a polynomial kernel, reduction-based
//! instance generators and brute-force oracles for cross-checking.

pub mod bgc;
pub mod error;
pub mod format;
pub mod gc;
pub mod gen;
pub mod graph;
pub mod kernel;
pub mod oracle;
pub mod slab;

pub use bgc::{Answer, SolveResult, SolveStats};
pub use error::{Error, Result};
pub use graph::{Corners, Graph, Vertex, VertexSet, WitnessMap};
