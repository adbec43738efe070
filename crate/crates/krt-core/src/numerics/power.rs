//! Spectral-norm estimation by power iteration on `B B^T`.

use alloc::vec;

use super::{dot, norm2};
use crate::{fmath, sampling, Error, Result};

/// Matrix-free action of a square operator and its transpose.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
    fn apply_transpose(&self, x: &[f64], out: &mut [f64]);
}

/// Stopping parameters for [`spectral_norm_estimate`].
#[derive(Clone, Copy, Debug)]
pub struct SpectralNormOptions {
    /// Relative stagnation tolerance on the Rayleigh quotient of `B B^T`.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed for the random start vector; fixed so estimates are reproducible.
    pub seed: u64,
}

impl Default for SpectralNormOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 5000,
            seed: 0x5EED,
        }
    }
}

/// Estimates the largest singular value of `B` by power iteration on `B B^T`
/// with a seeded Gaussian start vector.
///
/// The Rayleigh quotients `||B^T u_k||^2 / ||u_k||^2` are nondecreasing and
/// bounded by `sigma_max(B)^2`, so the returned value never exceeds the true
/// norm. Iteration stops once the quotient changes by less than `tol`
/// relatively; running past `max_iter` yields a convergence error carrying
/// the best estimate so far.
pub fn spectral_norm_estimate(
    op: &dyn LinearOperator,
    opts: &SpectralNormOptions,
) -> Result<f64> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidInput("spectral norm tolerance must be positive"));
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidInput("spectral norm max_iter must be >= 1"));
    }
    let n = op.dim();
    let mut u = sampling::standard_normal_vec(opts.seed, n);
    let mut z = vec![0.0; n];
    let mut rho_prev = 0.0;
    for iter in 0..opts.max_iter {
        let nu = norm2(&u);
        if nu == 0.0 {
            // Start vector (or iterate) annihilated: the operator is zero on
            // the sampled subspace.
            return Ok(0.0);
        }
        let inv = 1.0 / nu;
        for ui in u.iter_mut() {
            *ui *= inv;
        }
        op.apply_transpose(&u, &mut z);
        let rho = dot(&z, &z);
        if rho == 0.0 {
            return Ok(0.0);
        }
        if iter > 0 && (rho - rho_prev).abs() <= opts.tol * rho {
            return Ok(fmath::sqrt(rho));
        }
        rho_prev = rho;
        op.apply(&z, &mut u);
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        best: fmath::sqrt(rho_prev),
    })
}
