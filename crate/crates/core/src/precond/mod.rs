//! Preconditioners for the LOBPCG residual solve `M H = R`.

mod amg;
mod chebyshev;
mod polynomial;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laplacian::LinearOperator;
use crate::sparse::Block;

pub use amg::{aggregate, strength_graph, AmgConfig, AmgHierarchy, AmgLevel, AmgStats, CoarseSolver, Smoothing};
pub use chebyshev::{estimate_lambda_max, ChebyshevSmoother};
pub use polynomial::{GmresPolynomial, PolyConfig, DEFAULT_POLY_DEGREE};

/// Diagonal entries below this magnitude are treated as missing.
const TINY_DIAGONAL: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum PrecondKind {
    Jacobi,
    Polynomial,
    Amg,
}

impl std::fmt::Display for PrecondKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Jacobi => "jacobi",
            Self::Polynomial => "polynomial",
            Self::Amg => "amg",
        })
    }
}

/// `M = diag(A)^{-1}`.
#[derive(Debug, Clone)]
pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new(a: &LinearOperator) -> Self {
        let inv_diag = a
            .diagonal()
            .into_iter()
            .map(|d| if d.abs() < TINY_DIAGONAL { 1.0 } else { 1.0 / d })
            .collect();
        Self { inv_diag }
    }

    pub fn inv_diag(&self) -> &[f64] {
        &self.inv_diag
    }
}

/// Built preconditioner. Every variant's `apply` is linear and deterministic.
#[derive(Debug, Clone)]
pub enum Preconditioner {
    Jacobi(Jacobi),
    Polynomial(GmresPolynomial),
    Amg(AmgHierarchy),
}

impl Preconditioner {
    pub fn jacobi(a: &LinearOperator) -> Self {
        Self::Jacobi(Jacobi::new(a))
    }

    pub fn polynomial(a: &LinearOperator, cfg: &PolyConfig) -> Result<Self> {
        Ok(Self::Polynomial(GmresPolynomial::build(a, cfg)?))
    }

    pub fn amg(a: &LinearOperator, cfg: &AmgConfig) -> Result<Self> {
        Ok(Self::Amg(AmgHierarchy::build(a, cfg)?))
    }

    pub fn kind(&self) -> PrecondKind {
        match self {
            Self::Jacobi(_) => PrecondKind::Jacobi,
            Self::Polynomial(_) => PrecondKind::Polynomial,
            Self::Amg(_) => PrecondKind::Amg,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Jacobi(j) => j.inv_diag.len(),
            Self::Polynomial(p) => p.dim(),
            Self::Amg(h) => h.dim(),
        }
    }

    /// `H ≈ A^{-1} R`.
    pub fn apply(&self, r: &Block) -> Result<Block> {
        if r.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: r.nrows(),
            });
        }
        match self {
            Self::Jacobi(j) => {
                let mut h = r.clone();
                for mut col in h.column_iter_mut() {
                    for (x, s) in col.iter_mut().zip(&j.inv_diag) {
                        *x *= s;
                    }
                }
                Ok(h)
            }
            Self::Polynomial(p) => p.apply(r),
            Self::Amg(h) => h.apply(r),
        }
    }
}
