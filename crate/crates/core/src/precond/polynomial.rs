//! GMRES-polynomial preconditioner.
//!
//! A degree-`k` Arnoldi run on `A` yields harmonic Ritz values `θ_i`. The
//! GMRES residual polynomial is `π(λ) = Π (1 - λ/θ_i)` and the preconditioner
//! is `p(λ) = (1 - π(λ)) / λ`, applied in product form:
//!
//! ```text
//! y = 0; t = r
//! for i in 0..k:  y += t / θ_i;  t -= A t / θ_i
//! ```
//!
//! Roots are visited in modified Leja order to keep the partial products
//! bounded.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::laplacian::LinearOperator;
use crate::sparse::Block;

pub const DEFAULT_POLY_DEGREE: usize = 25;

/// Relative size of `h_{j+1,j}` below which Arnoldi is considered to have
/// found an invariant subspace.
const ARNOLDI_BREAKDOWN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyConfig {
    pub degree: usize,
    pub seed: u64,
    /// Direction removed from the Arnoldi seed. Defaults to the constant
    /// vector, the kernel of a combinatorial Laplacian.
    pub deflate: Option<Vec<f64>>,
}

impl Default for PolyConfig {
    fn default() -> Self {
        Self {
            degree: DEFAULT_POLY_DEGREE,
            seed: 0,
            deflate: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresPolynomial {
    op: LinearOperator,
    roots: Vec<f64>,
    requested_degree: usize,
}

impl GmresPolynomial {
    pub fn build(a: &LinearOperator, cfg: &PolyConfig) -> Result<Self> {
        if cfg.degree == 0 {
            return Err(Error::InvalidArgument("polynomial degree must be at least 1".into()));
        }
        let n = a.dim();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut v0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let defl = cfg.deflate.clone().unwrap_or_else(|| vec![1.0; n]);
        if defl.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: defl.len(),
            });
        }
        let dd: f64 = defl.iter().map(|x| x * x).sum();
        if dd > 0.0 {
            let c = v0.iter().zip(&defl).map(|(x, y)| x * y).sum::<f64>() / dd;
            v0.iter_mut().zip(&defl).for_each(|(x, y)| *x -= c * y);
        }
        let (h, h_next) = arnoldi(a, v0, cfg.degree.min(n));
        let roots = harmonic_ritz(&h, h_next);
        Ok(Self {
            op: a.clone(),
            roots: leja_order(roots),
            requested_degree: cfg.degree,
        })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Degree actually achieved (smaller than requested after an early
    /// Arnoldi breakdown).
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn is_truncated(&self) -> bool {
        self.roots.len() < self.requested_degree
    }

    /// Polynomial roots in application order.
    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn apply(&self, r: &Block) -> Result<Block> {
        let mut y = Block::zeros(r.nrows(), r.ncols());
        let mut t = r.clone();
        let k = self.roots.len();
        for (i, &theta) in self.roots.iter().enumerate() {
            y += &t / theta;
            if i + 1 < k {
                let at = self.op.apply_block(&t)?;
                t -= at / theta;
            }
        }
        Ok(y)
    }
}

/// Arnoldi with full reorthogonalization. Returns the square Hessenberg
/// block and `h_{m+1,m}` (zero after breakdown).
fn arnoldi(a: &LinearOperator, v0: Vec<f64>, k: usize) -> (DMatrix<f64>, f64) {
    let n = v0.len();
    let nrm0 = v0.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(nrm0 > 0.0) {
        return (DMatrix::zeros(0, 0), 0.0);
    }
    let mut basis: Vec<Vec<f64>> = vec![v0.into_iter().map(|x| x / nrm0).collect()];
    let mut h = DMatrix::<f64>::zeros(k + 1, k);
    let mut w = vec![0.0; n];
    let mut m = 0;
    let mut h_next = 0.0;
    let mut scale = 0.0f64;
    for j in 0..k {
        a.matrix().spmv(&basis[j], &mut w);
        for _pass in 0..2 {
            for (i, q) in basis.iter().enumerate() {
                let c: f64 = q.iter().zip(&w).map(|(x, y)| x * y).sum();
                h[(i, j)] += c;
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        scale = scale.max(h.column(j).amax());
        m = j + 1;
        if beta <= ARNOLDI_BREAKDOWN * scale.max(beta) {
            h_next = 0.0;
            break;
        }
        h[(j + 1, j)] = beta;
        h_next = beta;
        if j + 1 < k {
            basis.push(w.iter().map(|x| x / beta).collect());
        }
    }
    (h.view((0, 0), (m, m)).into_owned(), h_next)
}

/// Harmonic Ritz values of a symmetric Arnoldi run: the `θ` solving
/// `(H^2 + h^2 e_m e_m^T) y = θ H y`. Falls back to the nonsymmetric form
/// `H + h^2 H^{-T} e_m e_m^T` when `H` is not positive definite.
fn harmonic_ritz(h: &DMatrix<f64>, h_next: f64) -> Vec<f64> {
    let m = h.nrows();
    if m == 0 {
        return Vec::new();
    }
    let hs = (h + h.transpose()) * 0.5;
    if h_next == 0.0 {
        return SymmetricEigen::new(hs).eigenvalues.iter().copied().filter(|t| *t != 0.0).collect();
    }
    let mut lhs = &hs * &hs;
    lhs[(m - 1, m - 1)] += h_next * h_next;
    if let Some(chol) = Cholesky::new(hs.clone()) {
        let l = chol.l();
        let linv = l.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(m, m));
        let mut g = &linv * lhs * linv.transpose();
        let gt = g.transpose();
        g = (g + gt) * 0.5;
        return SymmetricEigen::new(g).eigenvalues.iter().copied().collect();
    }
    let mut e = DMatrix::zeros(m, 1);
    e[(m - 1, 0)] = 1.0;
    let f = match hs.transpose().lu().solve(&e) {
        Some(f) => f,
        None => return SymmetricEigen::new(hs).eigenvalues.iter().copied().filter(|t| t.abs() > 1e-14).collect(),
    };
    let mut mtx = hs.clone();
    for i in 0..m {
        mtx[(i, m - 1)] += h_next * h_next * f[(i, 0)];
    }
    mtx.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .filter(|t| t.abs() > 1e-14)
        .collect()
}

/// Modified Leja ordering: start from the largest magnitude, then greedily
/// maximize the product of distances to the roots already chosen.
fn leja_order(mut roots: Vec<f64>) -> Vec<f64> {
    roots.sort_by(|a, b| a.total_cmp(b));
    let k = roots.len();
    let mut used = vec![false; k];
    let mut out = Vec::with_capacity(k);
    let mut logprod = vec![0.0f64; k];
    for step in 0..k {
        let pick = if step == 0 {
            (0..k).fold(0, |b, i| if roots[i].abs() > roots[b].abs() { i } else { b })
        } else {
            let mut best = None;
            for i in (0..k).filter(|&i| !used[i]) {
                match best {
                    None => best = Some(i),
                    Some(b) if logprod[i] > logprod[b] => best = Some(i),
                    _ => {}
                }
            }
            best.unwrap()
        };
        used[pick] = true;
        out.push(roots[pick]);
        for i in 0..k {
            if !used[i] {
                let d = (roots[i] - roots[pick]).abs();
                logprod[i] += if d > 0.0 { d.ln() } else { -1e300 };
            }
        }
    }
    out
}
