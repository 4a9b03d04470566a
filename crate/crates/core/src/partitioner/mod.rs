//! Spectral embedding and multi-jagged recursive multisection.

mod mj;

use crate::error::{Error, Result};
use crate::sparse::Block;

pub use mj::{mj_partition, section_counts, MjPlan};

/// `floor(log2 K) + 1` eigenvectors for a K-way partition.
pub fn eigenvector_count(k: usize) -> Result<usize> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 parts, got {k}")));
    }
    Ok(k.ilog2() as usize + 1)
}

/// Vertex coordinates taken from eigenvectors `1..d`; the first eigenvector
/// carries no geometric information and is dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub coords: Block,
    pub d: usize,
}

impl Embedding {
    pub fn num_points(&self) -> usize {
        self.coords.nrows()
    }

    pub fn dims(&self) -> usize {
        self.coords.ncols()
    }

    pub fn coord(&self, point: usize, dim: usize) -> f64 {
        self.coords[(point, dim)]
    }
}

pub fn embed(x: &Block) -> Result<Embedding> {
    let d = x.ncols();
    if d < 2 {
        return Err(Error::InvalidArgument(format!("embedding needs at least 2 eigenvectors, got {d}")));
    }
    Ok(Embedding {
        coords: x.columns(1, d - 1).into_owned(),
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvector_count_examples() {
        assert_eq!(eigenvector_count(4).unwrap(), 3);
        assert_eq!(eigenvector_count(2).unwrap(), 2);
        assert_eq!(eigenvector_count(3).unwrap(), 2);
        assert_eq!(eigenvector_count(1024).unwrap(), 11);
        assert!(eigenvector_count(1).is_err());
    }

    #[test]
    fn embed_drops_first_column() {
        let x = Block::from_column_slice(2, 3, &[1., 1., 0.5, -0.5, 2., 3.]);
        let e = embed(&x).unwrap();
        assert_eq!(e.coords, Block::from_column_slice(2, 2, &[0.5, -0.5, 2., 3.]));
        assert_eq!(e.d, 3);
        let e = embed(&x.columns(0, 2).into_owned()).unwrap();
        assert_eq!(e.dims(), 1);
        assert!(embed(&Block::zeros(3, 1)).is_err());
    }
}
