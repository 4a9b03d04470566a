//! B-orthonormalization with rank repair, and the Rayleigh-Ritz projection.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::laplacian::LinearOperator;
use crate::sparse::Block;

/// Columns whose norm falls below this fraction of their original norm after
/// orthogonalization are treated as linearly dependent and dropped.
pub const RANK_DROP_TOL: f64 = 1e-10;

/// `B v` for a diagonal `B`, identity when absent.
pub fn b_scale(b: Option<&[f64]>, v: &Block) -> Block {
    match b {
        None => v.clone(),
        Some(d) => {
            let mut out = v.clone();
            for mut col in out.column_iter_mut() {
                for (x, w) in col.iter_mut().zip(d) {
                    *x *= w;
                }
            }
            out
        }
    }
}

fn b_dot(b: Option<&[f64]>, x: &[f64], y: &[f64]) -> f64 {
    match b {
        None => x.iter().zip(y).map(|(a, c)| a * c).sum(),
        Some(d) => x.iter().zip(y).zip(d).map(|((a, c), w)| a * c * w).sum(),
    }
}

/// Orthonormalized basis plus which input columns survived.
#[derive(Debug, Clone)]
pub struct Basis {
    pub q: Block,
    pub kept: Vec<usize>,
}

/// Column-wise Gram-Schmidt in the B-inner product with one
/// reorthogonalization pass. Dependent columns are dropped.
pub fn b_orthonormalize(s: &Block, b: Option<&[f64]>) -> Basis {
    let n = s.nrows();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(s.ncols());
    let mut kept = Vec::new();
    for j in 0..s.ncols() {
        let mut v: Vec<f64> = s.column(j).iter().copied().collect();
        let orig = b_dot(b, &v, &v).sqrt();
        if !(orig > 0.0) || !orig.is_finite() {
            continue;
        }
        for _pass in 0..2 {
            for q in &cols {
                let c = b_dot(b, q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nrm = b_dot(b, &v, &v).sqrt();
        if nrm < RANK_DROP_TOL * orig {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= nrm);
        cols.push(v);
        kept.push(j);
    }
    let data: Vec<f64> = cols.into_iter().flatten().collect();
    Basis {
        q: Block::from_vec(n, kept.len(), data),
        kept,
    }
}

/// Output of one Rayleigh-Ritz step.
#[derive(Debug, Clone)]
pub struct RitzPairs {
    /// `nev` smallest Ritz values, ascending.
    pub theta: Vec<f64>,
    /// Coefficients in the orthonormalized basis (`basis.ncols() x nev`).
    pub y: DMatrix<f64>,
    pub basis: Block,
    /// `A * basis`.
    pub a_basis: Block,
    /// Indices of the trial columns that survived rank repair.
    pub kept: Vec<usize>,
}

impl RitzPairs {
    /// Ritz vectors `basis * y`.
    pub fn vectors(&self) -> Block {
        &self.basis * &self.y
    }
}

/// Smallest `nev` eigenpairs of the pencil projected onto `span(s)`.
///
/// Fails with [`Error::Breakdown`] if fewer than `nev` independent columns
/// remain after rank repair.
pub fn rayleigh_ritz(
    s: &Block,
    a: &LinearOperator,
    b: Option<&[f64]>,
    nev: usize,
    iteration: usize,
) -> Result<RitzPairs> {
    if s.nrows() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: s.nrows(),
        });
    }
    let Basis { q, kept } = b_orthonormalize(s, b);
    if kept.len() < nev {
        return Err(Error::Breakdown {
            iteration,
            rank: kept.len(),
            required: nev,
        });
    }
    let aq = a.apply_block(&q)?;
    let mut g = q.transpose() * &aq;
    let g_t = g.transpose();
    g = (g + g_t) * 0.5;
    let (theta, y) = smallest_eigenpairs(g, nev);
    Ok(RitzPairs {
        theta,
        y,
        basis: q,
        a_basis: aq,
        kept,
    })
}

/// Ascending eigenpairs of a small symmetric matrix, truncated to `nev`.
/// Eigenvector signs are fixed so the largest-magnitude entry is positive.
pub fn smallest_eigenpairs(g: DMatrix<f64>, nev: usize) -> (Vec<f64>, DMatrix<f64>) {
    let k = g.nrows();
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let mut y = DMatrix::zeros(k, nev);
    let mut theta = Vec::with_capacity(nev);
    for (c, &i) in order.iter().take(nev).enumerate() {
        theta.push(eig.eigenvalues[i]);
        let col = eig.eigenvectors.column(i);
        let pivot = col.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for r in 0..k {
            y[(r, c)] = sign * col[r];
        }
    }
    (theta, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::laplacian::build_combinatorial;
    use crate::sparse::SparseMatrix;

    #[test]
    fn identity_basis_projects_to_operator() {
        let a = LinearOperator::new(SparseMatrix::diagonal_from(&[3.0, 1.0, 2.0])).unwrap();
        let rr = rayleigh_ritz(&Block::identity(3, 3), &a, None, 2, 0).unwrap();
        assert!((rr.theta[0] - 1.0).abs() < 1e-14);
        assert!((rr.theta[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn duplicate_column_is_repaired_or_breaks_down() {
        let a = LinearOperator::new(SparseMatrix::diagonal_from(&[3.0, 1.0, 2.0])).unwrap();
        let s = Block::from_column_slice(3, 3, &[1., 0., 0., 1., 0., 0., 0., 1., 0.]);
        let rr = rayleigh_ritz(&s, &a, None, 2, 0).unwrap();
        assert_eq!(rr.kept, vec![0, 2]);
        assert!((rr.theta[0] - 1.0).abs() < 1e-14);
        assert!(matches!(
            rayleigh_ritz(&s, &a, None, 3, 4),
            Err(Error::Breakdown { iteration: 4, rank: 2, required: 3 })
        ));
    }

    #[test]
    fn path_eigenvectors_give_path_spectrum() {
        // eigenvectors of L_C(path 0-1-2), by hand: 1, (1,0,-1), (1,-2,1)
        let l = build_combinatorial(&Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()).unwrap();
        let s = Block::from_column_slice(3, 3, &[1., 1., 1., 1., 0., -1., 1., -2., 1.]);
        let rr = rayleigh_ritz(&s, &l, None, 3, 0).unwrap();
        for (t, want) in rr.theta.iter().zip([0.0, 1.0, 3.0]) {
            assert!((t - want).abs() < 1e-12, "{t} vs {want}");
        }
    }

    #[test]
    fn b_orthonormal_output() {
        let b = [2.0, 1.0, 4.0, 3.0];
        let s = Block::from_column_slice(4, 2, &[1., 2., 3., 4., -1., 0., 1., 2.]);
        let basis = b_orthonormalize(&s, Some(&b));
        let gram = basis.q.transpose() * b_scale(Some(&b), &basis.q);
        assert!((gram - DMatrix::identity(2, 2)).amax() < 1e-14);
    }
}
