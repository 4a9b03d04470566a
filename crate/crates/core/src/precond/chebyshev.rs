//! Jacobi-scaled Chebyshev smoothing and the power iteration that sizes it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::sparse::{Block, SparseMatrix};

/// Estimates the largest eigenvalue of `D^{-1} A` with `iters` power steps
/// from a seeded random start. Returns the final Rayleigh quotient
/// `v'Av / v'Dv`.
pub fn estimate_lambda_max(a: &SparseMatrix, inv_diag: &[f64], iters: usize, seed: u64) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut av = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..iters.max(1) {
        a.spmv(&v, &mut av);
        let num: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
        let den: f64 = v.iter().zip(inv_diag).map(|(x, s)| x * x / s).sum();
        lambda = if den > 0.0 { num / den } else { 0.0 };
        for i in 0..n {
            v[i] = av[i] * inv_diag[i];
        }
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(nrm > 0.0) {
            break;
        }
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    a.spmv(&v, &mut av);
    let num: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
    let den: f64 = v.iter().zip(inv_diag).map(|(x, s)| x * x / s).sum();
    if den > 0.0 {
        lambda = lambda.max(num / den);
    }
    lambda
}

/// Degree-`k` Chebyshev iteration on `D^{-1} A` over `[lambda_min, lambda_max]`.
#[derive(Debug, Clone)]
pub struct ChebyshevSmoother {
    pub degree: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub inv_diag: Vec<f64>,
}

impl ChebyshevSmoother {
    /// Interval `[est / ratio, 1.1 * est]` from a power-iteration estimate.
    pub fn new(a: &SparseMatrix, degree: usize, power_iters: usize, eig_ratio: f64, seed: u64) -> Self {
        let inv_diag: Vec<f64> = a
            .diagonal()
            .into_iter()
            .map(|d| if d.abs() < 1e-300 { 1.0 } else { 1.0 / d })
            .collect();
        let est = estimate_lambda_max(a, &inv_diag, power_iters, seed);
        let est = if est > 0.0 { est } else { 1.0 };
        Self {
            degree,
            lambda_min: est / eig_ratio,
            lambda_max: 1.1 * est,
            inv_diag,
        }
    }

    fn scale(&self, r: &mut Block) {
        for mut col in r.column_iter_mut() {
            for (x, s) in col.iter_mut().zip(&self.inv_diag) {
                *x *= s;
            }
        }
    }

    /// Smooths `A x = b` starting from `x` (zero when `None`).
    pub fn smooth(&self, a: &SparseMatrix, b: &Block, x: Option<Block>) -> Result<Block> {
        let theta = 0.5 * (self.lambda_max + self.lambda_min);
        let delta = 0.5 * (self.lambda_max - self.lambda_min);
        let sigma = theta / delta;
        let mut rho = 1.0 / sigma;

        let (mut x, mut r) = match x {
            Some(x) => {
                let r = b - a.apply_block(&x)?;
                (x, r)
            }
            None => (Block::zeros(b.nrows(), b.ncols()), b.clone()),
        };
        self.scale(&mut r);
        let mut d = r / theta;
        x += &d;
        for _ in 1..self.degree {
            let rho_next = 1.0 / (2.0 * sigma - rho);
            let mut r = b - a.apply_block(&x)?;
            self.scale(&mut r);
            d = d * (rho_next * rho) + r * (2.0 * rho_next / delta);
            x += &d;
            rho = rho_next;
        }
        Ok(x)
    }
}
