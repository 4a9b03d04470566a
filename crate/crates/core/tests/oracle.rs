mod common;

use rand::Rng;

use specpart::eigensolver::{initial_guess, lobpcg, InitialVectors, SolverConfig};
use specpart::harness::{generate, GeneratorSpec};
use specpart::precond::{AmgConfig, PolyConfig, PrecondKind, Preconditioner};
use specpart::{EigenProblem, ProblemKind};

use common::*;

const KINDS: [ProblemKind; 3] = [ProblemKind::Combinatorial, ProblemKind::Generalized, ProblemKind::Normalized];

fn preconditioner(problem: &EigenProblem, kind: Option<PrecondKind>) -> Option<Preconditioner> {
    kind.map(|k| match k {
        PrecondKind::Jacobi => Preconditioner::jacobi(&problem.a),
        PrecondKind::Polynomial => Preconditioner::polynomial(&problem.a, &PolyConfig { degree: 10, ..Default::default() }).unwrap(),
        PrecondKind::Amg => {
            let mut cfg = AmgConfig::regular();
            cfg.coarse_size_threshold = 8;
            Preconditioner::amg(&problem.a, &cfg).unwrap()
        }
    })
}

#[test]
fn every_preconditioner_reaches_the_dense_spectrum() {
    let mut r = rng(7);
    for case in 0..8 {
        let n = r.gen_range(20..=60);
        let extra = r.gen_range(n / 2..2 * n);
        let edges = random_connected_edges(n, extra, &mut r);
        let g = graph(n, &edges);
        for kind in KINDS {
            let oracle = jacobi_eigenvalues(&dense_problem(n, &edges, kind));
            let problem = EigenProblem::build(&g, kind).unwrap();
            for pk in [None, Some(PrecondKind::Jacobi), Some(PrecondKind::Polynomial), Some(PrecondKind::Amg)] {
                let m = preconditioner(&problem, pk);
                let x0 = initial_guess(InitialVectors::Random, n, 3, case).unwrap();
                let res = lobpcg(&problem, m.as_ref(), &x0, &SolverConfig::new(3, 1e-9)).unwrap();
                assert!(res.all_converged(), "case {case} {kind} {pk:?}");
                for j in 0..3 {
                    assert!(
                        (res.theta[j] - oracle[j]).abs() < 1e-7,
                        "case {case} {kind} {pk:?}: {:?} vs {:?}",
                        res.theta,
                        &oracle[..3]
                    );
                }
            }
        }
    }
}

#[test]
fn piecewise_start_converges_on_a_grid() {
    let g = generate(&GeneratorSpec::Grid2D(12, 9)).unwrap();
    let n = g.num_vertices();
    let edges: Vec<_> = g.edges().collect();
    for kind in KINDS {
        let oracle = jacobi_eigenvalues(&dense_problem(n, &edges, kind));
        let problem = EigenProblem::build(&g, kind).unwrap();
        let m = Preconditioner::jacobi(&problem.a);
        let x0 = initial_guess(InitialVectors::Piecewise, n, 4, 0).unwrap();
        let res = lobpcg(&problem, Some(&m), &x0, &SolverConfig::new(4, 1e-9)).unwrap();
        for j in 0..4 {
            assert!((res.theta[j] - oracle[j]).abs() < 1e-7, "{kind}: {:?} vs {:?}", res.theta, &oracle[..4]);
        }
    }
}

#[test]
fn converged_columns_meet_the_residual_contract() {
    let g = generate(&GeneratorSpec::ScaleFree { n: 400, attach: 2, seed: 4 }).unwrap();
    for kind in KINDS {
        let problem = EigenProblem::build(&g, kind).unwrap();
        let m = Preconditioner::jacobi(&problem.a);
        let x0 = initial_guess(InitialVectors::Piecewise, 400, 4, 0).unwrap();
        let res = lobpcg(&problem, Some(&m), &x0, &SolverConfig::new(4, 1e-6)).unwrap();
        let ax = problem.a.apply_block(&res.x).unwrap();
        let b = problem.b_diagonal();
        for j in 0..4 {
            let r: f64 = (0..400)
                .map(|i| {
                    let bx = b.as_ref().map_or(1.0, |d| d[i]) * res.x[(i, j)];
                    (ax[(i, j)] - res.theta[j] * bx).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            assert!(res.converged[j]);
            assert!(r <= 1e-6 * problem.a.spectral_bound(), "{kind} column {j}: {r}");
            assert!(r <= res.threshold * (1.0 + 1e-9));
        }
    }
}
