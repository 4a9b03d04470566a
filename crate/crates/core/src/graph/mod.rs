//! Undirected graphs, preprocessing, and partition quality metrics.

mod metrics;
pub mod mtx;

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

pub use metrics::{cutsize, imbalance, read_partition_file, write_partition_file, Partition};
pub use mtx::parse_matrix_market;

/// Degree ratio above which a graph is treated as irregular.
pub const REGULAR_RATIO_LIMIT: f64 = 10.0;

/// Undirected graph stored as a symmetric adjacency pattern without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: SparseMatrix,
    vertex_weights: Vec<f64>,
    edge_costs: Option<Vec<f64>>,
}

impl Graph {
    /// Validates and wraps an adjacency pattern. `edge_costs`, when given, is
    /// aligned with the stored entries and must itself be symmetric.
    pub fn new(
        adjacency: SparseMatrix,
        vertex_weights: Option<Vec<f64>>,
        edge_costs: Option<Vec<f64>>,
    ) -> Result<Self> {
        if !adjacency.is_square() {
            return Err(Error::NotSquare(adjacency.nrows(), adjacency.ncols()));
        }
        let n = adjacency.nrows();
        let adjacency = match adjacency.values() {
            Some(_) => SparseMatrix::from_csr(
                n,
                n,
                adjacency.row_offsets().to_vec(),
                adjacency.col_indices().to_vec(),
                None,
            )?,
            None => adjacency,
        };
        for i in 0..n {
            for &j in adjacency.row_cols(i) {
                if i == j {
                    return Err(Error::InvalidArgument(format!("self-loop at vertex {i}")));
                }
                if adjacency.get(j, i).is_none() {
                    return Err(Error::InvalidArgument(format!("edge ({i}, {j}) has no reverse entry")));
                }
            }
        }
        let vertex_weights = vertex_weights.unwrap_or_else(|| vec![1.0; n]);
        if vertex_weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: vertex_weights.len(),
            });
        }
        if let Some(i) = vertex_weights.iter().position(|&w| !(w > 0.0)) {
            return Err(Error::InvalidArgument(format!("vertex {i} has non-positive weight")));
        }
        if let Some(c) = &edge_costs {
            if c.len() != adjacency.nnz() {
                return Err(Error::DimensionMismatch {
                    expected: adjacency.nnz(),
                    got: c.len(),
                });
            }
            let g = SparseMatrix::from_csr(
                n,
                n,
                adjacency.row_offsets().to_vec(),
                adjacency.col_indices().to_vec(),
                Some(c.clone()),
            )?;
            if !g.is_symmetric() {
                return Err(Error::InvalidArgument("edge costs are not symmetric".into()));
            }
        }
        Ok(Self {
            adjacency,
            vertex_weights,
            edge_costs,
        })
    }

    /// Unit-weight graph from an undirected edge list. Self-loops are dropped
    /// and repeated edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut entries = Vec::with_capacity(2 * edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u != v {
                entries.push((u, v));
                entries.push((v, u));
            }
        }
        Self::new(SparseMatrix::from_pattern(n, n, &entries), None, None)
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.nrows()
    }

    /// Undirected edge count.
    pub fn num_edges(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn edge_costs(&self) -> Option<&[f64]> {
        self.edge_costs.as_deref()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        self.adjacency.row_cols(v)
    }

    /// `(neighbor, cost)` pairs for vertex `v`.
    pub fn weighted_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let start = self.adjacency.row_offsets()[v];
        self.neighbors(v).iter().enumerate().map(move |(k, &u)| {
            let c = self.edge_costs.as_ref().map_or(1.0, |c| c[start + k]);
            (u, c)
        })
    }

    /// Neighbor count.
    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Sum of incident edge costs.
    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.weighted_neighbors(v).map(|(_, c)| c).sum()
    }

    /// Undirected edges `(u, v)` with `u < v`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            self.neighbors(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v))
        })
    }

    /// Component label per vertex, numbered in order of each component's
    /// smallest vertex id.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.num_vertices();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices() > 0 && self.component_labels().1 == 1
    }

    /// Subgraph induced by `keep` (sorted ascending, no duplicates).
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<Self> {
        let n = self.num_vertices();
        let mut new_id = vec![usize::MAX; n];
        for (k, &v) in keep.iter().enumerate() {
            new_id[v] = k;
        }
        let mut row_offsets = vec![0];
        let mut cols = Vec::new();
        let mut costs = self.edge_costs.as_ref().map(|_| Vec::new());
        for &v in keep {
            for (u, c) in self.weighted_neighbors(v) {
                if new_id[u] != usize::MAX {
                    cols.push(new_id[u]);
                    if let Some(cs) = costs.as_mut() {
                        cs.push(c);
                    }
                }
            }
            row_offsets.push(cols.len());
        }
        let m = keep.len();
        let adjacency = SparseMatrix::from_csr(m, m, row_offsets, cols, None)?;
        let weights = keep.iter().map(|&v| self.vertex_weights[v]).collect();
        Self::new(adjacency, Some(weights), costs)
    }
}

/// Maps each vertex of an extracted subgraph back to its original id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMap {
    pub original: Vec<usize>,
    /// Vertex count of the graph the subgraph was taken from.
    pub source_len: usize,
}

impl VertexMap {
    pub fn identity(n: usize) -> Self {
        Self {
            original: (0..n).collect(),
            source_len: n,
        }
    }

    pub fn dropped(&self) -> usize {
        self.source_len - self.original.len()
    }

    /// Original id -> new id, `None` for dropped vertices.
    pub fn forward(&self) -> Vec<Option<usize>> {
        let mut f = vec![None; self.source_len];
        for (new, &old) in self.original.iter().enumerate() {
            f[old] = Some(new);
        }
        f
    }
}

/// Undirected graph with the pattern of `A + A^T`, diagonal removed, unit
/// vertex weights and unit edge costs.
pub fn symmetrize(a: &SparseMatrix) -> Result<Graph> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.nrows(), a.ncols()));
    }
    let n = a.nrows();
    let mut entries = Vec::with_capacity(2 * a.nnz());
    for i in 0..n {
        for &j in a.row_cols(i) {
            if i != j {
                entries.push((i, j));
                entries.push((j, i));
            }
        }
    }
    Graph::new(SparseMatrix::from_pattern(n, n, &entries), None, None)
}

/// Extracts the largest connected component. Among equal-size components the
/// one holding the smallest vertex id wins. Vertex order is preserved.
pub fn largest_connected_component(g: &Graph) -> Result<(Graph, VertexMap)> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let (labels, count) = g.component_labels();
    if count == 1 {
        return Ok((g.clone(), VertexMap::identity(n)));
    }
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    // labels follow smallest-vertex order, so the first maximum is the tie winner
    let best = (0..count).fold(0, |b, l| if sizes[l] > sizes[b] { l } else { b });
    let keep: Vec<usize> = (0..n).filter(|&v| labels[v] == best).collect();
    let sub = g.induced_subgraph(&keep)?;
    Ok((
        sub,
        VertexMap {
            original: keep,
            source_len: n,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphClass {
    Regular,
    Irregular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphKind {
    pub kind: GraphClass,
    pub max_degree: usize,
    pub avg_degree: f64,
    pub ratio: f64,
}

impl GraphKind {
    /// Verdict for a given degree profile.
    pub fn from_degrees(max_degree: usize, avg_degree: f64) -> Self {
        // an edgeless graph has uniform (zero) degrees
        let ratio = if max_degree == 0 { 1.0 } else { max_degree as f64 / avg_degree };
        let kind = if ratio <= REGULAR_RATIO_LIMIT {
            GraphClass::Regular
        } else {
            GraphClass::Irregular
        };
        Self {
            kind,
            max_degree,
            avg_degree,
            ratio,
        }
    }

    pub fn is_regular(&self) -> bool {
        self.kind == GraphClass::Regular
    }
}

/// Classifies by the max-to-average neighbor count ratio.
pub fn classify(g: &Graph) -> Result<GraphKind> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let max = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    let avg = g.adjacency().nnz() as f64 / n as f64;
    Ok(GraphKind::from_degrees(max, avg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrize_single_entry() {
        let a = SparseMatrix::from_pattern(2, 2, &[(0, 1)]);
        let g = symmetrize(&a).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn symmetrize_is_idempotent_on_symmetric_input() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let g = symmetrize(tri.adjacency()).unwrap();
        assert_eq!(g, tri);
        let again = symmetrize(g.adjacency()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn symmetrize_zero_matrix_and_diagonal() {
        let g = symmetrize(&SparseMatrix::from_pattern(3, 3, &[])).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (3, 0));
        let d = symmetrize(&SparseMatrix::identity(3)).unwrap();
        assert_eq!(d.num_edges(), 0);
    }

    #[test]
    fn symmetrize_rejects_rectangular() {
        let a = SparseMatrix::from_pattern(2, 3, &[(0, 2)]);
        assert!(matches!(symmetrize(&a), Err(Error::NotSquare(2, 3))));
    }

    #[test]
    fn graph_rejects_asymmetric_and_loops() {
        assert!(Graph::new(SparseMatrix::from_pattern(2, 2, &[(0, 1)]), None, None).is_err());
        assert!(Graph::new(SparseMatrix::from_pattern(2, 2, &[(0, 0)]), None, None).is_err());
        let ok = SparseMatrix::from_pattern(2, 2, &[(0, 1), (1, 0)]);
        assert!(Graph::new(ok.clone(), Some(vec![1.0, 0.0]), None).is_err());
        assert!(Graph::new(ok, None, Some(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn lcc_picks_bigger_component() {
        // {0,2,4} triangle and {1,3} edge
        let g = Graph::from_edges(5, &[(0, 2), (2, 4), (0, 4), (1, 3)]).unwrap();
        let (sub, map) = largest_connected_component(&g).unwrap();
        assert_eq!(map.original, vec![0, 2, 4]);
        assert_eq!(sub.num_edges(), 3);
        assert_eq!(map.dropped(), 2);
    }

    #[test]
    fn lcc_identity_when_connected() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let (sub, map) = largest_connected_component(&g).unwrap();
        assert_eq!(sub, g);
        assert_eq!(map, VertexMap::identity(3));
    }

    #[test]
    fn lcc_tie_prefers_smallest_id() {
        let g = Graph::from_edges(4, &[(1, 3), (0, 2)]).unwrap();
        let (_, map) = largest_connected_component(&g).unwrap();
        assert_eq!(map.original, vec![0, 2]);
        let g = Graph::from_edges(4, &[(2, 3), (1, 0)]).unwrap();
        let (_, map) = largest_connected_component(&g).unwrap();
        assert_eq!(map.original, vec![0, 1]);
    }

    #[test]
    fn lcc_empty_graph() {
        let g = Graph::from_edges(0, &[]).unwrap();
        assert!(matches!(largest_connected_component(&g), Err(Error::EmptyGraph)));
    }

    #[test]
    fn classify_examples() {
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let kind = classify(&k4).unwrap();
        assert_eq!(kind.ratio, 1.0);
        assert_eq!(kind.kind, GraphClass::Regular);
        assert_eq!(GraphKind::from_degrees(436, 100.0).kind, GraphClass::Regular);
        assert_eq!(GraphKind::from_degrees(81, 1.0).kind, GraphClass::Irregular);
        assert_eq!(GraphKind::from_degrees(10, 1.0).kind, GraphClass::Regular);
    }

    #[test]
    fn classify_star() {
        // star with 20 leaves: max 20, avg 40/21
        let edges: Vec<_> = (1..=20).map(|v| (0, v)).collect();
        let g = Graph::from_edges(21, &edges).unwrap();
        let kind = classify(&g).unwrap();
        assert_eq!(kind.max_degree, 20);
        assert!((kind.ratio - 10.5).abs() < 1e-12);
        assert_eq!(kind.kind, GraphClass::Irregular);
    }
}
