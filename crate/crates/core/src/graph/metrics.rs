use std::io::{BufRead, Write};

use serde::Serialize;

use super::{Graph, VertexMap};
use crate::error::{Error, Result};

/// A K-way vertex partition with its quality metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub assignment: Vec<usize>,
    pub num_parts: usize,
    pub part_weights: Vec<f64>,
    /// Each cut edge counted once.
    pub cutsize: f64,
    /// `max_k W_k / W_avg`.
    pub imbalance: f64,
}

impl Partition {
    /// Checks the assignment and computes metrics from scratch.
    pub fn evaluate(g: &Graph, assignment: Vec<usize>, num_parts: usize) -> Result<Self> {
        if num_parts == 0 {
            return Err(Error::InvalidArgument("part count must be positive".into()));
        }
        let cut = cutsize(g, &assignment)?;
        let mut part_weights = vec![0.0; num_parts];
        let mut sizes = vec![0usize; num_parts];
        for (v, &p) in assignment.iter().enumerate() {
            if p >= num_parts {
                return Err(Error::InvalidArgument(format!("vertex {v} assigned to part {p} >= {num_parts}")));
            }
            part_weights[p] += g.vertex_weights()[v];
            sizes[p] += 1;
        }
        if let Some(k) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidArgument(format!("part {k} is empty")));
        }
        let imbalance = imbalance(&part_weights)?;
        Ok(Self {
            assignment,
            num_parts,
            part_weights,
            cutsize: cut,
            imbalance,
        })
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.num_parts];
        for &p in &self.assignment {
            s[p] += 1;
        }
        s
    }
}

/// Total cost of edges whose endpoints lie in different parts, each
/// undirected edge counted once.
pub fn cutsize(g: &Graph, assignment: &[usize]) -> Result<f64> {
    let n = g.num_vertices();
    if assignment.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: assignment.len(),
        });
    }
    let mut cut = 0.0;
    for u in 0..n {
        for (v, c) in g.weighted_neighbors(u) {
            if v > u && assignment[u] != assignment[v] {
                cut += c;
            }
        }
    }
    Ok(cut)
}

/// `max_k W_k / W_avg`.
pub fn imbalance(part_weights: &[f64]) -> Result<f64> {
    if part_weights.is_empty() {
        return Err(Error::InvalidArgument("no parts".into()));
    }
    if part_weights.iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidArgument("negative part weight".into()));
    }
    let total: f64 = part_weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument("all part weights are zero".into()));
    }
    let avg = total / part_weights.len() as f64;
    let max = part_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(max / avg)
}

/// One `originalVertexId partId` line per vertex, ascending by original id.
pub fn write_partition_file<W: Write>(assignment: &[usize], map: &VertexMap, mut out: W) -> Result<()> {
    let mut rows: Vec<(usize, usize)> = map.original.iter().copied().zip(assignment.iter().copied()).collect();
    rows.sort_unstable();
    for (v, p) in rows {
        writeln!(out, "{v} {p}")?;
    }
    Ok(())
}

/// Reads `vertex part` lines back into `(vertex, part)` pairs.
pub fn read_partition_file<R: BufRead>(input: R) -> Result<Vec<(usize, usize)>> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(v)), Some(Ok(p)), None) => rows.push((v, p)),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "partition file line {}: expected `vertex part`",
                    i + 1
                )))
            }
        }
    }
    Ok(rows)
}
