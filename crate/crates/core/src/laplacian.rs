//! Graph Laplacian operators and the eigenproblem pencils built from them.
//!
//! Three problem kinds are supported:
//!
//! ```text
//! Combinatorial:  L_C x = λ x          L_C = D - A
//! Generalized:    L_C x = λ D x
//! Normalized:     L_N x = λ x          L_N = I - D^{-1/2} A D^{-1/2}
//! ```
//!
//! Edge costs enter as negative off-diagonals and the diagonal holds the
//! weighted degree, so unit costs give the usual unweighted Laplacians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sparse::{Block, SparseMatrix};

/// Symmetric sparse operator with a Gershgorin bound on its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    matrix: SparseMatrix,
    spectral_bound: f64,
}

impl LinearOperator {
    pub fn new(matrix: SparseMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        let spectral_bound = matrix.gershgorin_upper();
        Ok(Self {
            matrix,
            spectral_bound,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn spectral_bound(&self) -> f64 {
        self.spectral_bound
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal()
    }

    /// `op * v`, column by column.
    pub fn apply_block(&self, v: &Block) -> Result<Block> {
        self.matrix.apply_block(v)
    }

    /// True when only diagonal entries are stored.
    pub fn is_diagonal(&self) -> bool {
        (0..self.dim()).all(|i| self.matrix.row_cols(i).iter().all(|&j| j == i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Combinatorial,
    Generalized,
    Normalized,
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Combinatorial => "combinatorial",
            Self::Generalized => "generalized",
            Self::Normalized => "normalized",
        })
    }
}

/// `A x = λ B x`, with `B` absent (identity) except for the generalized kind.
#[derive(Debug, Clone)]
pub struct EigenProblem {
    pub kind: ProblemKind,
    pub a: LinearOperator,
    pub b: Option<LinearOperator>,
}

impl EigenProblem {
    pub fn build(g: &Graph, kind: ProblemKind) -> Result<Self> {
        match kind {
            ProblemKind::Combinatorial => Ok(Self {
                kind,
                a: build_combinatorial(g)?,
                b: None,
            }),
            ProblemKind::Generalized => {
                let b = build_degree(g)?;
                if let Some(i) = b.diagonal().iter().position(|&d| !(d > 0.0)) {
                    return Err(Error::DegenerateDegree(i));
                }
                Ok(Self {
                    kind,
                    a: build_combinatorial(g)?,
                    b: Some(b),
                })
            }
            ProblemKind::Normalized => Ok(Self {
                kind,
                a: build_normalized(g)?,
                b: None,
            }),
        }
    }

    /// Custom pencil. `b`, if given, must be diagonal with a positive diagonal.
    pub fn from_operators(kind: ProblemKind, a: LinearOperator, b: Option<LinearOperator>) -> Result<Self> {
        if let Some(b) = &b {
            if b.dim() != a.dim() {
                return Err(Error::DimensionMismatch {
                    expected: a.dim(),
                    got: b.dim(),
                });
            }
            if !b.is_diagonal() || b.diagonal().iter().any(|&d| !(d > 0.0)) {
                return Err(Error::InvalidArgument("B must be diagonal with positive entries".into()));
            }
        }
        Ok(Self { kind, a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Diagonal of `B`, if present.
    pub fn b_diagonal(&self) -> Option<Vec<f64>> {
        self.b.as_ref().map(|b| b.diagonal())
    }

    /// Known kernel direction of `A`: the constant vector for `L_C`, and
    /// `D^{1/2} 1` for `L_N`.
    pub fn kernel_vector(&self, g: &Graph) -> Vec<f64> {
        match self.kind {
            ProblemKind::Normalized => (0..g.num_vertices()).map(|v| g.weighted_degree(v).sqrt()).collect(),
            _ => vec![1.0; g.num_vertices()],
        }
    }
}

/// `L_C = D - A`.
pub fn build_combinatorial(g: &Graph) -> Result<LinearOperator> {
    let n = g.num_vertices();
    let adj = g.adjacency();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(adj.nnz() + n);
    let mut vals = Vec::with_capacity(adj.nnz() + n);
    row_offsets.push(0);
    for i in 0..n {
        let deg = g.weighted_degree(i);
        let mut placed = false;
        for (j, c) in g.weighted_neighbors(i) {
            if !placed && j > i {
                cols.push(i);
                vals.push(deg);
                placed = true;
            }
            cols.push(j);
            vals.push(-c);
        }
        if !placed {
            cols.push(i);
            vals.push(deg);
        }
        row_offsets.push(cols.len());
    }
    LinearOperator::new(SparseMatrix::from_csr(n, n, row_offsets, cols, Some(vals))?)
}

/// `L_N = I - D^{-1/2} A D^{-1/2}`. Every vertex needs a positive degree.
pub fn build_normalized(g: &Graph) -> Result<LinearOperator> {
    let n = g.num_vertices();
    let deg: Vec<f64> = (0..n)
        .map(|v| {
            let d = g.weighted_degree(v);
            if d > 0.0 {
                Ok(d)
            } else {
                Err(Error::DegenerateDegree(v))
            }
        })
        .collect::<Result<_>>()?;
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(g.adjacency().nnz() + n);
    let mut vals = Vec::with_capacity(g.adjacency().nnz() + n);
    row_offsets.push(0);
    for i in 0..n {
        let mut placed = false;
        for (j, c) in g.weighted_neighbors(i) {
            if !placed && j > i {
                cols.push(i);
                vals.push(1.0);
                placed = true;
            }
            cols.push(j);
            vals.push(-c / (deg[i] * deg[j]).sqrt());
        }
        if !placed {
            cols.push(i);
            vals.push(1.0);
        }
        row_offsets.push(cols.len());
    }
    LinearOperator::new(SparseMatrix::from_csr(n, n, row_offsets, cols, Some(vals))?)
}

/// Diagonal matrix of weighted degrees.
pub fn build_degree(g: &Graph) -> Result<LinearOperator> {
    let d: Vec<f64> = (0..g.num_vertices()).map(|v| g.weighted_degree(v)).collect();
    LinearOperator::new(SparseMatrix::diagonal_from(&d))
}

/// Convenience wrapper over [`LinearOperator::apply_block`].
pub fn apply_block(op: &LinearOperator, v: &Block) -> Result<Block> {
    op.apply_block(v)
}
