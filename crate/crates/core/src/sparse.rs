//! Compressed sparse row storage and the handful of kernels the solvers need.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense column block, `n x m`, column-major.
pub type Block = DMatrix<f64>;

/// Rows shorter than this are not worth splitting across threads.
const PAR_MIN_ROWS: usize = 2048;

/// CSR matrix in canonical form: strictly increasing column indices per row.
///
/// `values` is `None` for pattern-only matrices, in which case every stored
/// entry reads as `1.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Option<Vec<f64>>,
}

impl SparseMatrix {
    /// Builds a canonical matrix from unsorted triplets. Duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of range");
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            let k = next[r];
            cols[k] = c;
            vals[k] = v;
            next[r] += 1;
        }

        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for i in 0..nrows {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|k| (cols[k], vals[k])));
            // stable sort keeps duplicate summation order fixed
            scratch.sort_by_key(|&(c, _)| c);
            for &(c, v) in &scratch {
                if col_indices.len() > row_offsets[i] && *col_indices.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values: Some(values),
        }
    }

    /// Builds a pattern-only matrix; duplicate positions collapse to one entry.
    pub fn from_pattern(nrows: usize, ncols: usize, entries: &[(usize, usize)]) -> Self {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); nrows];
        for &(r, c) in entries {
            assert!(r < nrows && c < ncols, "entry ({r}, {c}) out of range");
            rows[r].push(c);
        }
        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::with_capacity(entries.len());
        row_offsets.push(0);
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            col_indices.extend(row);
            row_offsets.push(col_indices.len());
        }
        Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values: None,
        }
    }

    /// Assembles from raw CSR arrays, validating canonical form.
    pub fn from_csr(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Option<Vec<f64>>,
    ) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("CSR arrays: {msg}")));
        if row_offsets.len() != nrows + 1 || row_offsets[0] != 0 {
            return bad("row_offsets must have length nrows + 1 and start at 0");
        }
        if *row_offsets.last().unwrap() != col_indices.len() {
            return bad("last row offset must equal the number of entries");
        }
        if let Some(v) = &values {
            if v.len() != col_indices.len() {
                return bad("values and col_indices differ in length");
            }
        }
        for i in 0..nrows {
            if row_offsets[i] > row_offsets[i + 1] {
                return bad("row_offsets must be nondecreasing");
            }
            let row = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            if row.iter().any(|&c| c >= ncols) {
                return bad("column index out of range");
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return bad("column indices must be strictly increasing within a row");
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal_from(&vec![1.0; n])
    }

    pub fn diagonal_from(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: Some(diag.to_vec()),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn is_pattern(&self) -> bool {
        self.values.is_none()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> Option<&[f64]> {
        self.values.as_deref()
    }

    /// Column indices of row `i`.
    pub fn row_cols(&self, i: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    /// Iterates `(col, value)` over row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        range.map(move |k| (self.col_indices[k], self.value_at(k)))
    }

    #[inline]
    pub fn value_at(&self, k: usize) -> f64 {
        match &self.values {
            Some(v) => v[k],
            None => 1.0,
        }
    }

    /// Stored value at `(i, j)`, or `None` if the position is structurally empty.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let start = self.row_offsets[i];
        self.row_cols(i)
            .binary_search(&j)
            .ok()
            .map(|p| self.value_at(start + p))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i).unwrap_or(0.0))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; self.nnz()];
        let mut vals = self.values.as_ref().map(|_| vec![0.0; self.nnz()]);
        // rows visited in increasing order, so each transposed row is sorted
        for i in 0..self.nrows {
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                let c = self.col_indices[k];
                let dst = next[c];
                cols[dst] = i;
                if let Some(v) = vals.as_mut() {
                    v[dst] = self.value_at(k);
                }
                next[c] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_offsets: counts,
            col_indices: cols,
            values: vals,
        }
    }

    /// Sparse product `self * other` with a fixed accumulation order.
    pub fn matmul(&self, other: &SparseMatrix) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                got: other.nrows,
            });
        }
        let ncols = other.ncols;
        let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..self.nrows)
            .into_par_iter()
            .with_min_len(256)
            .map_init(
                || (vec![0.0f64; ncols], vec![usize::MAX; ncols]),
                |(acc, marker), i| {
                    let mut touched: Vec<usize> = Vec::new();
                    for (k, a) in self.row(i) {
                        for (j, b) in other.row(k) {
                            if marker[j] != i {
                                marker[j] = i;
                                acc[j] = 0.0;
                                touched.push(j);
                            }
                            acc[j] += a * b;
                        }
                    }
                    touched.sort_unstable();
                    let vals = touched.iter().map(|&j| acc[j]).collect();
                    (touched, vals)
                },
            )
            .collect();
        let mut row_offsets = Vec::with_capacity(self.nrows + 1);
        row_offsets.push(0);
        let total: usize = rows.iter().map(|r| r.0.len()).sum();
        let mut col_indices = Vec::with_capacity(total);
        let mut values = Vec::with_capacity(total);
        for (c, v) in rows {
            col_indices.extend(c);
            values.extend(v);
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            nrows: self.nrows,
            ncols,
            row_offsets,
            col_indices,
            values: Some(values),
        })
    }

    /// `y = self * x` for a single vector.
    pub fn spmv(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        let kernel = |(i, yi): (usize, &mut f64)| {
            let mut s = 0.0;
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                s += self.value_at(k) * x[self.col_indices[k]];
            }
            *yi = s;
        };
        if self.nrows >= PAR_MIN_ROWS {
            y.par_iter_mut()
                .enumerate()
                .with_min_len(PAR_MIN_ROWS / 2)
                .for_each(kernel);
        } else {
            y.iter_mut().enumerate().for_each(kernel);
        }
    }

    /// `self * v` applied column by column. Each output entry is a sequential
    /// row sum, so the result does not depend on the thread count.
    pub fn apply_block(&self, v: &Block) -> Result<Block> {
        if v.nrows() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                got: v.nrows(),
            });
        }
        let m = v.ncols();
        let mut out = Block::zeros(self.nrows, m);
        if self.nrows == 0 || m == 0 {
            return Ok(out);
        }
        let src = v.as_slice();
        let n_in = self.ncols;
        out.as_mut_slice()
            .par_chunks_mut(self.nrows)
            .enumerate()
            .for_each(|(j, col)| self.spmv(&src[j * n_in..(j + 1) * n_in], col));
        Ok(out)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                d[(i, j)] += v;
            }
        }
        d
    }

    /// True if the stored pattern and values are symmetric.
    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        (0..self.nrows).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == Some(v)))
    }

    /// Gershgorin upper bound on the spectrum: `max_i (a_ii + sum_{j != i} |a_ij|)`.
    pub fn gershgorin_upper(&self) -> f64 {
        (0..self.nrows)
            .map(|i| {
                self.row(i)
                    .map(|(j, v)| if j == i { v } else { v.abs() })
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    }
}
