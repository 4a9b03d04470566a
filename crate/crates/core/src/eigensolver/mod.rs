//! Preconditioned LOBPCG for the smallest eigenpairs of `A x = λ B x`.
//!
//! Each iteration solves `M H = R` for the unconverged residual columns,
//! runs Rayleigh-Ritz on `S = [X, H, P]`, and updates the search directions
//! from the non-`X` part of the Ritz coefficients. Converged columns stay in
//! `X` (and therefore in `S`) but drop out of `R`, `H`, and `P`.
//!
//! A column counts as converged when `||A x - θ B x||_2 <= tol * min(1, bound)`
//! for B-normalized `x`, where `bound` is the Gershgorin bound of `A`. Scaling
//! by `|θ|` would never accept the zero eigenvalue every Laplacian has, and
//! scaling by the full bound is far too loose once a hub vertex inflates it.

mod init;
pub mod rr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laplacian::EigenProblem;
use crate::precond::Preconditioner;
use crate::sparse::Block;

pub use init::{initial_guess, initial_guess_piecewise, initial_guess_random, InitialVectors};
pub use rr::{b_orthonormalize, rayleigh_ritz, RitzPairs};

pub const DEFAULT_MAX_ITERS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub nev: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Freeze converged columns out of the residual and direction blocks.
    pub locking: bool,
}

impl SolverConfig {
    pub fn new(nev: usize, tol: f64) -> Self {
        Self {
            nev,
            tol,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
            locking: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nev == 0 {
            return Err(Error::InvalidArgument("nev must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// One line of the iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub min_residual: f64,
    pub max_residual: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Ritz values, ascending.
    pub theta: Vec<f64>,
    /// B-orthonormal Ritz vectors, one per column.
    pub x: Block,
    pub iterations: usize,
    pub residual_norms: Vec<f64>,
    pub converged: Vec<bool>,
    /// Convergence threshold actually applied (`tol * min(1, bound)`).
    pub threshold: f64,
    /// Rayleigh-Ritz restarts without search directions after a breakdown.
    pub breakdown_retries: usize,
    /// The trial basis stopped growing before convergence.
    pub stagnated: bool,
    pub history: Vec<IterationRecord>,
}

impl EigenResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

struct Iterate {
    x: Block,
    ax: Block,
    theta: Vec<f64>,
}

fn residual(b: Option<&[f64]>, it: &Iterate) -> (Block, Vec<f64>) {
    let bx = rr::b_scale(b, &it.x);
    let mut r = it.ax.clone();
    for (j, &t) in it.theta.iter().enumerate() {
        let mut col = r.column_mut(j);
        col.axpy(-t, &bx.column(j), 1.0);
    }
    let norms = r.column_iter().map(|c| c.norm()).collect();
    (r, norms)
}

fn select_columns(m: &Block, idx: &[usize]) -> Block {
    let mut out = Block::zeros(m.nrows(), idx.len());
    for (c, &j) in idx.iter().enumerate() {
        out.set_column(c, &m.column(j));
    }
    out
}

fn hstack(blocks: &[&Block]) -> Block {
    let n = blocks[0].nrows();
    let m: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut data = Vec::with_capacity(n * m);
    for b in blocks {
        data.extend_from_slice(b.as_slice());
    }
    Block::from_vec(n, m, data)
}

/// Runs LOBPCG from the starting block `x0` (`n x nev`).
///
/// Reaching `max_iters` is not an error: the result flags which columns
/// converged. A rank-deficient trial basis triggers one retry without search
/// directions; a second breakdown is returned as [`Error::Breakdown`].
pub fn lobpcg(
    problem: &EigenProblem,
    precond: Option<&Preconditioner>,
    x0: &Block,
    cfg: &SolverConfig,
) -> Result<EigenResult> {
    cfg.validate()?;
    let n = problem.dim();
    if x0.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x0.nrows(),
        });
    }
    if x0.ncols() != cfg.nev {
        return Err(Error::DimensionMismatch {
            expected: cfg.nev,
            got: x0.ncols(),
        });
    }
    if cfg.nev > n {
        return Err(Error::InvalidArgument(format!("nev {} exceeds dimension {n}", cfg.nev)));
    }
    if let Some(m) = precond {
        if m.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.dim(),
            });
        }
    }

    let nev = cfg.nev;
    let bdiag = problem.b_diagonal();
    let b = bdiag.as_deref();
    let threshold = cfg.tol * problem.a.spectral_bound().min(1.0);
    let mut retries = 0usize;

    let rr0 = match rayleigh_ritz(x0, &problem.a, b, nev, 0) {
        Ok(rr) => rr,
        Err(Error::Breakdown { .. }) => {
            retries += 1;
            rayleigh_ritz(x0, &problem.a, b, nev, 0)?
        }
        Err(e) => return Err(e),
    };
    let mut it = Iterate {
        x: rr0.vectors(),
        ax: &rr0.a_basis * &rr0.y,
        theta: rr0.theta,
    };
    let (mut r, mut norms) = residual(b, &it);
    let mut converged: Vec<bool> = norms.iter().map(|&nr| nr <= threshold).collect();
    let mut history = vec![record(0, &norms, &it.theta)];
    let mut p: Option<Block> = None;
    let mut iterations = 0;
    let mut stagnated = false;

    while !converged.iter().all(|&c| c) && iterations < cfg.max_iters {
        iterations += 1;
        let active: Vec<usize> = if cfg.locking {
            (0..nev).filter(|&j| !converged[j]).collect()
        } else {
            (0..nev).collect()
        };
        let r_active = select_columns(&r, &active);
        let h = match precond {
            Some(m) => m.apply(&r_active)?,
            None => r_active,
        };

        let rr = loop {
            let s = match &p {
                Some(pb) => hstack(&[&it.x, &h, pb]),
                None => hstack(&[&it.x, &h]),
            };
            match rayleigh_ritz(&s, &problem.a, b, nev, iterations) {
                Ok(rr) => break rr,
                Err(Error::Breakdown { .. }) if retries == 0 => {
                    retries += 1;
                    p = None;
                }
                Err(e) => return Err(e),
            }
        };
        // X is B-orthonormal, so its columns always survive and lead the basis
        let nx = rr.kept.iter().filter(|&&k| k < nev).count();
        if rr.basis.ncols() == nx {
            stagnated = true;
            break;
        }

        it = Iterate {
            x: rr.vectors(),
            ax: &rr.a_basis * &rr.y,
            theta: rr.theta.clone(),
        };
        (r, norms) = residual(b, &it);
        converged = norms.iter().map(|&nr| nr <= threshold).collect();
        history.push(record(iterations, &norms, &it.theta));

        let next_active: Vec<usize> = if cfg.locking {
            (0..nev).filter(|&j| !converged[j]).collect()
        } else {
            (0..nev).collect()
        };
        if next_active.is_empty() {
            p = None;
        } else {
            let tail = rr.basis.columns(nx, rr.basis.ncols() - nx);
            let y_tail = rr.y.rows(nx, rr.y.nrows() - nx);
            let y_sel = select_columns(&y_tail.into_owned(), &next_active);
            p = Some(tail * y_sel);
        }
    }

    Ok(EigenResult {
        theta: it.theta,
        x: it.x,
        iterations,
        residual_norms: norms,
        converged,
        threshold,
        breakdown_retries: retries,
        stagnated,
        history,
    })
}

fn record(iter: usize, norms: &[f64], theta: &[f64]) -> IterationRecord {
    IterationRecord {
        iter,
        min_residual: norms.iter().cloned().fold(f64::INFINITY, f64::min),
        max_residual: norms.iter().cloned().fold(0.0, f64::max),
        theta: theta.to_vec(),
    }
}
