//! End-to-end spectral partitioning: Laplacian, LOBPCG, embedding, MJ.
//!
//! Unset knobs resolve in a fixed order: classify the graph, pick the
//! preconditioner, then the problem kind and tolerance, then the starting
//! vectors. Anything set explicitly skips its step.

use std::time::Instant;

use serde::Serialize;

use crate::eigensolver::{
    initial_guess, lobpcg, EigenResult, InitialVectors, IterationRecord, SolverConfig, DEFAULT_MAX_ITERS,
};
use crate::error::{Error, Result};
use crate::graph::{classify, GraphClass, GraphKind, Partition};
use crate::graph::Graph;
use crate::laplacian::{EigenProblem, ProblemKind};
use crate::partitioner::{eigenvector_count, embed, mj_partition};
use crate::precond::{AmgConfig, AmgStats, PolyConfig, PrecondKind, Preconditioner};
use crate::sparse::Block;

pub const DEFAULT_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemChoice {
    Auto,
    Fixed(ProblemKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecondChoice {
    Auto,
    None,
    Fixed(PrecondKind),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub parts: usize,
    pub problem: ProblemChoice,
    pub precond: PrecondChoice,
    /// `None` selects the default for the graph class and preconditioner.
    pub tol: Option<f64>,
    pub max_iters: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub doubled_cut: bool,
    pub init: Option<InitialVectors>,
    /// Caller-supplied starting block; overrides `init`.
    pub initial_block: Option<Block>,
    pub poly_degree: usize,
}

impl RunConfig {
    pub fn new(parts: usize) -> Self {
        Self {
            parts,
            problem: ProblemChoice::Auto,
            precond: PrecondChoice::Auto,
            tol: None,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            doubled_cut: false,
            init: None,
            initial_block: None,
            poly_degree: crate::precond::DEFAULT_POLY_DEGREE,
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub parts: usize,
    pub nev: usize,
    pub problem: ProblemKind,
    pub precond: Option<PrecondKind>,
    pub tol: f64,
    pub init: String,
    pub max_iters: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub doubled_cut: bool,
    pub threads: usize,
}

/// Default problem kind and tolerance per graph class and preconditioner.
/// Running without a preconditioner follows the Jacobi row.
pub fn select_defaults(kind: &GraphKind, precond: Option<PrecondKind>) -> (ProblemKind, f64) {
    use PrecondKind::*;
    match (kind.kind, precond.unwrap_or(Jacobi)) {
        (GraphClass::Regular, Jacobi | Polynomial) => (ProblemKind::Combinatorial, 1e-3),
        (GraphClass::Regular, Amg) => (ProblemKind::Combinatorial, 1e-2),
        (GraphClass::Irregular, Jacobi | Amg) => (ProblemKind::Generalized, 1e-2),
        (GraphClass::Irregular, Polynomial) => (ProblemKind::Normalized, 1e-2),
    }
}

pub fn select_precond_auto(kind: &GraphKind) -> PrecondKind {
    match kind.kind {
        GraphClass::Regular => PrecondKind::Amg,
        GraphClass::Irregular => PrecondKind::Polynomial,
    }
}

pub fn select_initial_vectors(kind: &GraphKind) -> InitialVectors {
    match kind.kind {
        GraphClass::Regular => InitialVectors::Random,
        GraphClass::Irregular => InitialVectors::Piecewise,
    }
}

/// Applies the resolution order to `cfg`.
pub fn resolve(kind: &GraphKind, cfg: &RunConfig) -> Result<ResolvedConfig> {
    if cfg.parts < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 parts, got {}", cfg.parts)));
    }
    if !(cfg.epsilon >= 0.0) {
        return Err(Error::InvalidArgument("epsilon must be nonnegative".into()));
    }
    if let Some(t) = cfg.tol {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
    }
    let precond = match cfg.precond {
        PrecondChoice::Auto => Some(select_precond_auto(kind)),
        PrecondChoice::None => None,
        PrecondChoice::Fixed(p) => Some(p),
    };
    let (default_problem, default_tol) = select_defaults(kind, precond);
    let problem = match cfg.problem {
        ProblemChoice::Auto => default_problem,
        ProblemChoice::Fixed(p) => p,
    };
    let init = if cfg.initial_block.is_some() {
        "user".to_string()
    } else {
        let iv = cfg.init.unwrap_or_else(|| select_initial_vectors(kind));
        serde_json::to_value(iv).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    };
    Ok(ResolvedConfig {
        parts: cfg.parts,
        nev: eigenvector_count(cfg.parts)?,
        problem,
        precond,
        tol: cfg.tol.unwrap_or(default_tol),
        init,
        max_iters: cfg.max_iters,
        seed: cfg.seed,
        epsilon: cfg.epsilon,
        doubled_cut: cfg.doubled_cut,
        threads: rayon::current_num_threads(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub avg_degree: f64,
    pub degree_ratio: f64,
    pub kind: GraphClass,
    pub dropped_vertices: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageTimes {
    pub laplacian: f64,
    pub eigensolve: f64,
    pub partition: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub graph: GraphStats,
    pub config: ResolvedConfig,
    pub iterations: usize,
    pub eigenvalues: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub converged: Vec<bool>,
    pub convergence_threshold: f64,
    pub seconds: StageTimes,
    /// Reported cut; doubled when `doubled_cut` is set.
    pub cutsize: f64,
    pub cut_edges: f64,
    pub imbalance: f64,
    pub part_weights: Vec<f64>,
    pub amg: Option<AmgStats>,
    pub polynomial_degree: Option<usize>,
    pub warnings: Vec<String>,
    /// Per-iteration residuals; written separately from the JSON report.
    #[serde(skip)]
    pub trace: Vec<IterationRecord>,
}

/// Builds the preconditioner named by `kind` for `problem`.
pub fn build_preconditioner(
    g: &Graph,
    problem: &EigenProblem,
    kind: PrecondKind,
    graph_kind: &GraphKind,
    seed: u64,
    poly_degree: usize,
) -> Result<Preconditioner> {
    match kind {
        PrecondKind::Jacobi => Ok(Preconditioner::jacobi(&problem.a)),
        PrecondKind::Polynomial => {
            let cfg = PolyConfig {
                degree: poly_degree,
                seed,
                deflate: Some(problem.kernel_vector(g)),
            };
            Preconditioner::polynomial(&problem.a, &cfg)
        }
        PrecondKind::Amg => {
            let mut cfg = if graph_kind.is_regular() {
                AmgConfig::regular()
            } else {
                AmgConfig::irregular()
            };
            cfg.seed = seed;
            Preconditioner::amg(&problem.a, &cfg)
        }
    }
}

/// Eigen-solve stage on its own: problem, preconditioner, and LOBPCG.
pub fn solve_eigenproblem(
    g: &Graph,
    resolved: &ResolvedConfig,
    graph_kind: &GraphKind,
    x0: Option<&Block>,
) -> Result<(EigenProblem, Option<Preconditioner>, EigenResult)> {
    let problem = EigenProblem::build(g, resolved.problem)?;
    let (precond, result) = eigensolve(g, &problem, resolved, graph_kind, x0, crate::precond::DEFAULT_POLY_DEGREE)?;
    Ok((problem, precond, result))
}

fn eigensolve(
    g: &Graph,
    problem: &EigenProblem,
    resolved: &ResolvedConfig,
    graph_kind: &GraphKind,
    x0: Option<&Block>,
    poly_degree: usize,
) -> Result<(Option<Preconditioner>, EigenResult)> {
    let n = g.num_vertices();
    let precond = resolved
        .precond
        .map(|k| build_preconditioner(g, problem, k, graph_kind, resolved.seed, poly_degree))
        .transpose()?;
    let start = match x0 {
        Some(b) => b.clone(),
        None => {
            let iv = if resolved.init == "piecewise" {
                InitialVectors::Piecewise
            } else {
                InitialVectors::Random
            };
            initial_guess(iv, n, resolved.nev, resolved.seed)?
        }
    };
    let cfg = SolverConfig {
        nev: resolved.nev,
        tol: resolved.tol,
        max_iters: resolved.max_iters,
        seed: resolved.seed,
        locking: true,
    };
    let result = lobpcg(problem, precond.as_ref(), &start, &cfg)?;
    Ok((precond, result))
}

fn distinct_points(coords: &Block) -> usize {
    let mut rows: Vec<Vec<u64>> = (0..coords.nrows())
        .map(|i| coords.row(i).iter().map(|v| v.to_bits()).collect())
        .collect();
    rows.sort_unstable();
    rows.dedup();
    rows.len()
}

/// Partitions a connected graph into `cfg.parts` parts.
pub fn partition_graph(g: &Graph, cfg: &RunConfig) -> Result<(Partition, RunReport)> {
    let total_start = Instant::now();
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if cfg.parts > n {
        return Err(Error::InfeasibleParts { n, parts: cfg.parts });
    }
    let kind = classify(g)?;
    let resolved = resolve(&kind, cfg)?;
    if let Some(b) = &cfg.initial_block {
        if b.nrows() != n || b.ncols() != resolved.nev {
            return Err(Error::InvalidArgument(format!(
                "initial block is {}x{}, expected {}x{}",
                b.nrows(),
                b.ncols(),
                n,
                resolved.nev
            )));
        }
    }
    let mut warnings = Vec::new();
    if !g.is_connected() {
        warnings.push("graph is disconnected; extract the largest component first".to_string());
    }

    let t = Instant::now();
    let problem = EigenProblem::build(g, resolved.problem)?;
    let laplacian_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (precond, eig) = eigensolve(g, &problem, &resolved, &kind, cfg.initial_block.as_ref(), cfg.poly_degree)?;
    let eigensolve_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let emb = embed(&eig.x)?;
    let assignment = mj_partition(&emb, g.vertex_weights(), cfg.parts)?;
    let partition = Partition::evaluate(g, assignment, cfg.parts)?;
    let partition_secs = t.elapsed().as_secs_f64();

    let unconverged = eig.converged.iter().filter(|&&c| !c).count();
    if unconverged > 0 {
        warnings.push(format!(
            "partial convergence: {unconverged} of {} eigenvectors above tolerance after {} iterations",
            resolved.nev, eig.iterations
        ));
    }
    if eig.stagnated {
        warnings.push("eigensolver stagnated: trial basis stopped growing".into());
    }
    if eig.breakdown_retries > 0 {
        warnings.push("eigensolver breakdown; retried without search directions".into());
    }
    let mut amg = None;
    let mut polynomial_degree = None;
    match &precond {
        Some(Preconditioner::Amg(h)) => {
            let stats = h.stats();
            if stats.stagnated {
                warnings.push(format!("multigrid coarsening stagnated at {} levels", stats.levels));
            }
            amg = Some(stats);
        }
        Some(Preconditioner::Polynomial(p)) => {
            if p.is_truncated() {
                warnings.push(format!("polynomial truncated to degree {}", p.degree()));
            }
            polynomial_degree = Some(p.degree());
        }
        _ => {}
    }
    if partition.imbalance > 1.0 + resolved.epsilon {
        warnings.push(format!(
            "imbalance {:.4} exceeds 1 + epsilon = {:.4}",
            partition.imbalance,
            1.0 + resolved.epsilon
        ));
    }
    let distinct = distinct_points(&emb.coords);
    if distinct < cfg.parts {
        warnings.push(format!(
            "embedding has only {distinct} distinct points for {} parts; ties split by vertex id",
            cfg.parts
        ));
    }

    let report = RunReport {
        graph: GraphStats {
            vertices: n,
            edges: g.num_edges(),
            max_degree: kind.max_degree,
            avg_degree: kind.avg_degree,
            degree_ratio: kind.ratio,
            kind: kind.kind,
            dropped_vertices: 0,
        },
        config: resolved.clone(),
        iterations: eig.iterations,
        eigenvalues: eig.theta.clone(),
        residual_norms: eig.residual_norms.clone(),
        converged: eig.converged.clone(),
        convergence_threshold: eig.threshold,
        seconds: StageTimes {
            laplacian: laplacian_secs,
            eigensolve: eigensolve_secs,
            partition: partition_secs,
            total: total_start.elapsed().as_secs_f64(),
        },
        cutsize: if resolved.doubled_cut {
            2.0 * partition.cutsize
        } else {
            partition.cutsize
        },
        cut_edges: partition.cutsize,
        imbalance: partition.imbalance,
        part_weights: partition.part_weights.clone(),
        amg,
        polynomial_degree,
        warnings,
        trace: eig.history,
    };
    Ok((partition, report))
}
