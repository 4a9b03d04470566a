//! Aggregation-based algebraic multigrid, applied as one V-cycle.

use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use super::chebyshev::{estimate_lambda_max, ChebyshevSmoother};
use crate::error::{Error, Result};
use crate::laplacian::LinearOperator;
use crate::sparse::{Block, SparseMatrix};

/// Largest coarse operator factored densely; anything bigger falls back to
/// Chebyshev.
const MAX_DIRECT_COARSE: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothing {
    Smoothed,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoarseSolver {
    Direct,
    Chebyshev { power_iters: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmgConfig {
    pub smoothing: Smoothing,
    pub drop_tol: f64,
    pub max_levels: usize,
    pub cheby_degree: usize,
    pub power_iters_setup: usize,
    pub eig_ratio: f64,
    pub coarse_size_threshold: usize,
    pub coarse_solver: CoarseSolver,
    pub seed: u64,
}

impl AmgConfig {
    /// Smoothed aggregation, no dropping, direct coarse solve.
    pub fn regular() -> Self {
        Self {
            smoothing: Smoothing::Smoothed,
            drop_tol: 0.0,
            max_levels: 20,
            cheby_degree: 3,
            power_iters_setup: 10,
            eig_ratio: 7.0,
            coarse_size_threshold: 500,
            coarse_solver: CoarseSolver::Direct,
            seed: 0,
        }
    }

    /// Plain aggregation with a 0.4 drop tolerance, at most 5 levels, and a
    /// Chebyshev coarse solve.
    pub fn irregular() -> Self {
        Self {
            smoothing: Smoothing::Plain,
            drop_tol: 0.4,
            max_levels: 5,
            coarse_solver: CoarseSolver::Chebyshev { power_iters: 100 },
            ..Self::regular()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.drop_tol) {
            return Err(Error::InvalidArgument("drop_tol must lie in [0, 1)".into()));
        }
        if self.max_levels == 0 || self.cheby_degree == 0 {
            return Err(Error::InvalidArgument("max_levels and cheby_degree must be positive".into()));
        }
        if !(self.eig_ratio > 1.0) {
            return Err(Error::InvalidArgument("eig_ratio must exceed 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AmgLevel {
    pub a: SparseMatrix,
    /// Prolongation to this level from the next coarser one.
    pub p: SparseMatrix,
    /// Restriction, `P^T`.
    pub r: SparseMatrix,
    pub smoother: ChebyshevSmoother,
}

#[derive(Debug, Clone)]
enum Coarse {
    Direct(Cholesky<f64, nalgebra::Dyn>),
    Chebyshev(ChebyshevSmoother),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmgStats {
    pub levels: usize,
    pub sizes: Vec<usize>,
    pub nnz: Vec<usize>,
    pub stagnated: bool,
    pub coarse_solver: String,
}

#[derive(Debug, Clone)]
pub struct AmgHierarchy {
    pub levels: Vec<AmgLevel>,
    pub coarse_a: SparseMatrix,
    coarse: Coarse,
    stagnated: bool,
}

/// Strong-coupling pattern: off-diagonal `(i, j)` kept iff
/// `|a_ij| >= drop_tol * sqrt(|a_ii a_jj|)`.
pub fn strength_graph(a: &SparseMatrix, drop_tol: f64) -> Vec<Vec<(usize, f64)>> {
    let diag = a.diagonal();
    (0..a.nrows())
        .map(|i| {
            a.row(i)
                .filter(|&(j, v)| j != i && v.abs() >= drop_tol * (diag[i] * diag[j]).abs().sqrt())
                .map(|(j, v)| (j, v.abs()))
                .collect()
        })
        .collect()
}

/// Greedy aggregation. Returns the aggregate id of each row and the count.
///
/// Pass 1 visits rows in ascending order and roots a new aggregate at any row
/// whose strong neighbors are all free. Pass 2 attaches each leftover row to
/// the pass-1 aggregate of its strongest aggregated neighbor. Pass 3 groups
/// whatever remains with its free neighbors.
pub fn aggregate(strong: &[Vec<(usize, f64)>]) -> (Vec<usize>, usize) {
    const FREE: usize = usize::MAX;
    let n = strong.len();
    let mut agg = vec![FREE; n];
    let mut count = 0;
    for i in 0..n {
        if agg[i] == FREE && strong[i].iter().all(|&(j, _)| agg[j] == FREE) {
            agg[i] = count;
            for &(j, _) in &strong[i] {
                agg[j] = count;
            }
            count += 1;
        }
    }
    let first_pass = agg.clone();
    for i in 0..n {
        if agg[i] != FREE {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for &(j, w) in &strong[i] {
            if first_pass[j] != FREE && best.is_none_or(|(_, bw)| w > bw) {
                best = Some((j, w));
            }
        }
        if let Some((j, _)) = best {
            agg[i] = first_pass[j];
        }
    }
    for i in 0..n {
        if agg[i] == FREE {
            agg[i] = count;
            for &(j, _) in &strong[i] {
                if agg[j] == FREE {
                    agg[j] = count;
                }
            }
            count += 1;
        }
    }
    (agg, count)
}

fn tentative_prolongator(agg: &[usize], count: usize) -> SparseMatrix {
    let mut sizes = vec![0usize; count];
    for &a in agg {
        sizes[a] += 1;
    }
    let triplets: Vec<_> = agg
        .iter()
        .enumerate()
        .map(|(i, &a)| (i, a, 1.0 / (sizes[a] as f64).sqrt()))
        .collect();
    SparseMatrix::from_triplets(agg.len(), count, &triplets)
}

/// `(I - ω D^{-1} A) P`.
fn smooth_prolongator(a: &SparseMatrix, p: &SparseMatrix, omega: f64, inv_diag: &[f64]) -> Result<SparseMatrix> {
    let ap = a.matmul(p)?;
    let mut triplets = Vec::with_capacity(p.nnz() + ap.nnz());
    for i in 0..p.nrows() {
        triplets.extend(p.row(i).map(|(j, v)| (i, j, v)));
        triplets.extend(ap.row(i).map(|(j, v)| (i, j, -omega * inv_diag[i] * v)));
    }
    Ok(SparseMatrix::from_triplets(p.nrows(), p.ncols(), &triplets))
}

fn inverse_diagonal(a: &SparseMatrix) -> Vec<f64> {
    a.diagonal()
        .into_iter()
        .map(|d| if d.abs() < 1e-300 { 1.0 } else { 1.0 / d })
        .collect()
}

/// Dense Cholesky of `A + shift I` with `shift = 1e-8 * trace / n`.
fn direct_coarse(a: &SparseMatrix) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    let n = a.nrows();
    let mut d: DMatrix<f64> = a.to_dense();
    let trace: f64 = d.diagonal().sum();
    let shift = if n > 0 && trace > 0.0 { 1e-8 * trace / n as f64 } else { 1e-8 };
    for i in 0..n {
        d[(i, i)] += shift;
    }
    Cholesky::new(d)
}

impl AmgHierarchy {
    pub fn build(op: &LinearOperator, cfg: &AmgConfig) -> Result<Self> {
        cfg.validate()?;
        let mut levels = Vec::new();
        let mut current = op.matrix().clone();
        let mut stagnated = false;
        loop {
            let n = current.nrows();
            if n <= cfg.coarse_size_threshold || levels.len() + 1 >= cfg.max_levels {
                break;
            }
            let strong = strength_graph(&current, cfg.drop_tol);
            let (agg, count) = aggregate(&strong);
            if count >= n || count == 0 {
                stagnated = true;
                break;
            }
            let seed = cfg.seed.wrapping_add(levels.len() as u64);
            let smoother = ChebyshevSmoother::new(&current, cfg.cheby_degree, cfg.power_iters_setup, cfg.eig_ratio, seed);
            let mut p = tentative_prolongator(&agg, count);
            if cfg.smoothing == Smoothing::Smoothed {
                let inv_diag = inverse_diagonal(&current);
                let lambda = estimate_lambda_max(&current, &inv_diag, cfg.power_iters_setup, seed);
                if lambda > 0.0 {
                    let omega = 4.0 / (3.0 * lambda);
                    p = smooth_prolongator(&current, &p, omega, &inv_diag)?;
                }
            }
            let r = p.transpose();
            let coarse = r.matmul(&current.matmul(&p)?)?;
            levels.push(AmgLevel {
                a: current,
                p,
                r,
                smoother,
            });
            current = coarse;
        }

        let cheby = |power_iters: usize| {
            let seed = cfg.seed.wrapping_add(levels.len() as u64);
            Coarse::Chebyshev(ChebyshevSmoother::new(&current, cfg.cheby_degree, power_iters, cfg.eig_ratio, seed))
        };
        let coarse = match cfg.coarse_solver {
            CoarseSolver::Direct if current.nrows() <= MAX_DIRECT_COARSE => match direct_coarse(&current) {
                Some(c) => Coarse::Direct(c),
                None => cheby(100),
            },
            CoarseSolver::Direct => cheby(100),
            CoarseSolver::Chebyshev { power_iters } => cheby(power_iters),
        };
        Ok(Self {
            levels,
            coarse_a: current,
            coarse,
            stagnated,
        })
    }

    pub fn dim(&self) -> usize {
        self.levels.first().map_or(self.coarse_a.nrows(), |l| l.a.nrows())
    }

    /// Level count including the coarsest.
    pub fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn stagnated(&self) -> bool {
        self.stagnated
    }

    /// Operators from finest to coarsest.
    pub fn operators(&self) -> Vec<&SparseMatrix> {
        let mut ops: Vec<&SparseMatrix> = self.levels.iter().map(|l| &l.a).collect();
        ops.push(&self.coarse_a);
        ops
    }

    pub fn stats(&self) -> AmgStats {
        let ops = self.operators();
        AmgStats {
            levels: ops.len(),
            sizes: ops.iter().map(|a| a.nrows()).collect(),
            nnz: ops.iter().map(|a| a.nnz()).collect(),
            stagnated: self.stagnated,
            coarse_solver: match self.coarse {
                Coarse::Direct(_) => "direct".into(),
                Coarse::Chebyshev(_) => "chebyshev".into(),
            },
        }
    }

    fn coarse_solve(&self, b: &Block) -> Result<Block> {
        match &self.coarse {
            Coarse::Direct(c) => Ok(c.solve(b)),
            Coarse::Chebyshev(s) => s.smooth(&self.coarse_a, b, None),
        }
    }

    fn cycle(&self, level: usize, b: &Block) -> Result<Block> {
        let Some(lvl) = self.levels.get(level) else {
            return self.coarse_solve(b);
        };
        let mut x = lvl.smoother.smooth(&lvl.a, b, None)?;
        let residual = b - lvl.a.apply_block(&x)?;
        let coarse_b = lvl.r.apply_block(&residual)?;
        let coarse_x = self.cycle(level + 1, &coarse_b)?;
        x += lvl.p.apply_block(&coarse_x)?;
        lvl.smoother.smooth(&lvl.a, b, Some(x))
    }

    /// One V-cycle with zero initial guess.
    pub fn apply(&self, r: &Block) -> Result<Block> {
        self.cycle(0, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, GeneratorSpec};
    use crate::laplacian::build_combinatorial;

    fn grid(w: usize, h: usize) -> LinearOperator {
        build_combinatorial(&generate(&GeneratorSpec::Grid2D(w, h)).unwrap()).unwrap()
    }

    #[test]
    fn small_problem_is_single_level() {
        let a = grid(10, 10);
        let h = AmgHierarchy::build(&a, &AmgConfig::regular()).unwrap();
        assert_eq!(h.num_levels(), 1);
        assert!(h.levels.is_empty());
    }

    #[test]
    fn plain_grid_coarsens_by_half_or_better() {
        let a = grid(32, 32);
        let cfg = AmgConfig {
            smoothing: Smoothing::Plain,
            coarse_size_threshold: 10,
            ..AmgConfig::regular()
        };
        let h = AmgHierarchy::build(&a, &cfg).unwrap();
        let sizes = h.stats().sizes;
        assert!(sizes.len() >= 2, "{sizes:?}");
        for w in sizes.windows(2) {
            assert!(2 * w[1] < w[0], "{sizes:?}");
        }
    }

    #[test]
    fn galerkin_products_are_exact() {
        let a = grid(32, 32);
        let h = AmgHierarchy::build(&a, &AmgConfig::regular()).unwrap();
        let ops = h.operators();
        for (l, lvl) in h.levels.iter().enumerate() {
            let rap = lvl.p.transpose().matmul(&lvl.a.matmul(&lvl.p).unwrap()).unwrap();
            assert_eq!(&rap, ops[l + 1]);
            assert_eq!(lvl.r, lvl.p.transpose());
        }
    }

    #[test]
    fn irregular_caps_levels() {
        let a = grid(64, 64);
        let cfg = AmgConfig {
            coarse_size_threshold: 1,
            drop_tol: 0.0,
            ..AmgConfig::irregular()
        };
        let h = AmgHierarchy::build(&a, &cfg).unwrap();
        assert_eq!(h.num_levels(), 5);
    }

    #[test]
    fn aggregation_covers_every_row() {
        let a = grid(7, 5);
        let strong = strength_graph(a.matrix(), 0.0);
        let (agg, count) = aggregate(&strong);
        assert!(agg.iter().all(|&g| g < count));
        let mut seen = vec![false; count];
        agg.iter().for_each(|&g| seen[g] = true);
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn drop_tolerance_removes_weak_couplings() {
        // hub with 9 leaves: |a_0j| = 1 vs 0.4 * sqrt(9 * 1) = 1.2
        let edges: Vec<_> = (1..10).map(|v| (0, v)).collect();
        let g = crate::graph::Graph::from_edges(10, &edges).unwrap();
        let a = build_combinatorial(&g).unwrap();
        assert!(strength_graph(a.matrix(), 0.4).iter().all(|r| r.is_empty()));
        assert_eq!(strength_graph(a.matrix(), 0.0)[0].len(), 9);
    }
}
