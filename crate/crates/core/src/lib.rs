//! Spectral graph partitioning: LOBPCG on graph Laplacians, preconditioned
//! by Jacobi, a GMRES polynomial or aggregation AMG, followed by
//! multi-jagged cuts of the spectral embedding.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigensolver;
pub mod error;
pub mod graph;
pub mod harness;
pub mod laplacian;
pub mod partitioner;
pub mod pipeline;
pub mod precond;
pub mod sparse;

pub use error::{Error, ParseError, Result};
pub use graph::{Graph, Partition};
pub use laplacian::{EigenProblem, ProblemKind};
pub use pipeline::{partition_graph, RunConfig, RunReport};
pub use precond::PrecondKind;
pub use sparse::{Block, SparseMatrix};
