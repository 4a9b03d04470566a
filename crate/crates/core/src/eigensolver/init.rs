//! Starting blocks for LOBPCG.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::Block;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialVectors {
    Random,
    Piecewise,
}

fn check(n: usize, d: usize) -> Result<()> {
    if d == 0 || d > n {
        return Err(Error::InvalidArgument(format!(
            "cannot build {d} initial vectors in dimension {n}"
        )));
    }
    Ok(())
}

/// Uniform(-1, 1) entries from a ChaCha8 stream, filled column by column.
pub fn initial_guess_random(n: usize, d: usize, seed: u64) -> Result<Block> {
    check(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Ok(Block::from_vec(n, d, data))
}

/// Column 0 is all ones; column `j >= 1` is the indicator of block `j - 1`
/// when `0..n` is cut into `d` contiguous blocks, the first `n mod d` of
/// which hold one extra index. The last block is never used, which keeps the
/// constant vector out of the span of the indicators.
pub fn initial_guess_piecewise(n: usize, d: usize) -> Result<Block> {
    check(n, d)?;
    let mut x = Block::zeros(n, d);
    x.column_mut(0).fill(1.0);
    let (base, extra) = (n / d, n % d);
    let mut start = 0;
    for j in 1..d {
        let len = base + usize::from(j - 1 < extra);
        for i in start..start + len {
            x[(i, j)] = 1.0;
        }
        start += len;
    }
    Ok(x)
}

pub fn initial_guess(kind: InitialVectors, n: usize, d: usize, seed: u64) -> Result<Block> {
    match kind {
        InitialVectors::Random => initial_guess_random(n, d, seed),
        InitialVectors::Piecewise => initial_guess_piecewise(n, d),
    }
}
