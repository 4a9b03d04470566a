//! Helpers shared by the integration tests. Nothing here calls into the
//! crate's numerical code, so the checks stay independent of it.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use specpart::{Graph, ProblemKind};

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum::<f64>().max(1.0);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Dense matrix whose eigenvalues are those of the requested problem,
/// built straight from the edge list. The generalized pencil `(L, D)` is
/// reduced to `D^{-1/2} L D^{-1/2}`.
pub fn dense_problem(n: usize, edges: &[(usize, usize)], kind: ProblemKind) -> Vec<Vec<f64>> {
    let mut l = vec![vec![0.0; n]; n];
    for &(u, v) in edges {
        l[u][v] -= 1.0;
        l[v][u] -= 1.0;
        l[u][u] += 1.0;
        l[v][v] += 1.0;
    }
    match kind {
        ProblemKind::Combinatorial => l,
        ProblemKind::Normalized | ProblemKind::Generalized => {
            let d: Vec<f64> = (0..n).map(|i| l[i][i]).collect();
            (0..n)
                .map(|i| (0..n).map(|j| l[i][j] / (d[i] * d[j]).sqrt()).collect())
                .collect()
        }
    }
}

/// Random connected simple graph: a random spanning tree plus `extra`
/// random edges.
pub fn random_connected_edges(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    edges.into_iter().collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges).expect("valid edge list")
}

/// Number of edges whose endpoints carry different labels.
pub fn count_cut(edges: &[(usize, usize)], labels: &[usize]) -> usize {
    edges.iter().filter(|&&(u, v)| labels[u] != labels[v]).count()
}
