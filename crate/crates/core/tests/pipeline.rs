mod common;

use specpart::graph::{cutsize, read_partition_file, write_partition_file, VertexMap};
use specpart::harness::{generate, GeneratorSpec, Stencil};
use specpart::partitioner::eigenvector_count;
use specpart::pipeline::{PrecondChoice, ProblemChoice};
use specpart::{partition_graph, Error, PrecondKind, ProblemKind, RunConfig};

use common::*;

#[test]
fn ring_of_eight_splits_into_two_arcs() {
    let g = generate(&GeneratorSpec::Ring(8)).unwrap();
    let mut cfg = RunConfig::new(2);
    cfg.tol = Some(1e-6);
    let (p, rep) = partition_graph(&g, &cfg).unwrap();
    assert_eq!(rep.cutsize, 2.0);
    assert_eq!(p.part_sizes(), vec![4, 4]);
    // contiguous arcs: exactly two label changes around the ring
    let changes = (0..8).filter(|&i| p.assignment[i] != p.assignment[(i + 1) % 8]).count();
    assert_eq!(changes, 2);
}

#[test]
fn sixteen_vertices_into_four_parts() {
    let g = generate(&GeneratorSpec::Grid2D(4, 4)).unwrap();
    assert_eq!(eigenvector_count(4).unwrap(), 3);
    let (p, rep) = partition_graph(&g, &RunConfig::new(4)).unwrap();
    assert_eq!(rep.config.nev, 3);
    assert_eq!(rep.eigenvalues.len(), 3);
    assert_eq!(p.part_sizes(), vec![4, 4, 4, 4]);
    assert_eq!(p.imbalance, 1.0);
}

#[test]
fn report_cut_matches_the_written_assignment() {
    let g = generate(&GeneratorSpec::ScaleFree { n: 1500, attach: 3, seed: 2 }).unwrap();
    let mut cfg = RunConfig::new(6);
    cfg.doubled_cut = true;
    let (p, rep) = partition_graph(&g, &cfg).unwrap();
    let mut buf = Vec::new();
    write_partition_file(&p.assignment, &VertexMap::identity(g.num_vertices()), &mut buf).unwrap();
    let labels: Vec<usize> = read_partition_file(&buf[..]).unwrap().into_iter().map(|(_, l)| l).collect();
    let edges: Vec<_> = g.edges().collect();
    assert_eq!(rep.cut_edges, count_cut(&edges, &labels) as f64);
    assert_eq!(rep.cut_edges, cutsize(&g, &labels).unwrap());
    assert_eq!(rep.cutsize, 2.0 * rep.cut_edges);
}

#[test]
fn auto_configuration_follows_the_graph_class() {
    let grid = generate(&GeneratorSpec::Grid2D(20, 20)).unwrap();
    let (_, rep) = partition_graph(&grid, &RunConfig::new(4)).unwrap();
    assert_eq!(rep.config.precond, Some(PrecondKind::Amg));
    assert_eq!(rep.config.problem, ProblemKind::Combinatorial);
    assert_eq!(rep.config.tol, 1e-2);
    assert_eq!(rep.config.init, "random");
    assert!(rep.amg.is_some());

    let sf = generate(&GeneratorSpec::ScaleFree { n: 2000, attach: 2, seed: 3 }).unwrap();
    let (_, rep) = partition_graph(&sf, &RunConfig::new(4)).unwrap();
    assert_eq!(rep.config.precond, Some(PrecondKind::Polynomial));
    assert_eq!(rep.config.problem, ProblemKind::Normalized);
    assert_eq!(rep.config.init, "piecewise");
    assert_eq!(rep.polynomial_degree, Some(25));

    let mut cfg = RunConfig::new(4);
    cfg.precond = PrecondChoice::None;
    cfg.problem = ProblemChoice::Fixed(ProblemKind::Generalized);
    let (_, rep) = partition_graph(&sf, &cfg).unwrap();
    assert_eq!(rep.config.precond, None);
    assert_eq!(rep.config.problem, ProblemKind::Generalized);
}

#[test]
fn partial_convergence_still_partitions_with_a_warning() {
    let g = generate(&GeneratorSpec::Grid2D(30, 30)).unwrap();
    let mut cfg = RunConfig::new(4);
    cfg.precond = PrecondChoice::Fixed(PrecondKind::Jacobi);
    cfg.max_iters = 2;
    cfg.tol = Some(1e-8);
    let (p, rep) = partition_graph(&g, &cfg).unwrap();
    assert_eq!(rep.iterations, 2);
    assert!(rep.converged.iter().any(|&c| !c));
    assert!(rep.warnings.iter().any(|w| w.contains("partial convergence")), "{:?}", rep.warnings);
    assert_eq!(p.part_sizes().iter().sum::<usize>(), 900);
}

#[test]
fn infeasible_requests_are_errors() {
    let g = generate(&GeneratorSpec::Path(5)).unwrap();
    assert!(matches!(partition_graph(&g, &RunConfig::new(6)), Err(Error::InfeasibleParts { .. })));
    assert!(matches!(partition_graph(&g, &RunConfig::new(1)), Err(Error::InvalidArgument(_))));
}

#[test]
fn eigensolve_dominates_on_stencils() {
    let g = generate(&GeneratorSpec::Stencil3D(20, 20, 20, Stencil::Points27)).unwrap();
    let mut cfg = RunConfig::new(24);
    cfg.precond = PrecondChoice::Fixed(PrecondKind::Jacobi);
    let (_, rep) = partition_graph(&g, &cfg).unwrap();
    let s = rep.seconds;
    assert!(s.eigensolve >= 0.5 * s.total, "{s:?}");
}

#[test]
fn identical_runs_give_identical_partitions() {
    let g = generate(&GeneratorSpec::ScaleFree { n: 1000, attach: 3, seed: 8 }).unwrap();
    let mut cfg = RunConfig::new(5);
    cfg.seed = 11;
    let (a, ra) = partition_graph(&g, &cfg).unwrap();
    let (b, rb) = partition_graph(&g, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra.eigenvalues, rb.eigenvalues);
    assert_eq!(ra.iterations, rb.iterations);
}
