//! Dense vector/matrix core: the uniformly weighted inner product, a small
//! row-major matrix type, the square operator wrapper, small dense SVD, and
//! spectral-norm estimation by power iteration.

mod matrix;
mod power;
mod svd;

pub use matrix::{DenseMatrix, DenseOperator};
pub use power::{spectral_norm_estimate, LinearOperator, SpectralNormOptions};
pub use svd::{small_svd, SmallSvd};

use crate::{Error, Result};

/// Uniform scale factor applied to the Euclidean inner product.
///
/// `OneOverN` gives `<u, v> = (1/n) sum u_j v_j`, the mesh-independent inner
/// product natural for grid functions; `Euclidean` is the plain dot product.
/// All downstream quantities that matter for parameter selection are
/// invariant under this choice as long as norms entering the discrepancy
/// bounds are taken consistently.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InnerProductWeight {
    #[default]
    Euclidean,
    OneOverN,
}

impl InnerProductWeight {
    /// The scalar `w` with `<u, v>_w = w * sum u_j v_j` for vectors of length `n`.
    pub fn factor(self, n: usize) -> f64 {
        match self {
            InnerProductWeight::Euclidean => 1.0,
            InnerProductWeight::OneOverN => 1.0 / n as f64,
        }
    }
}

/// Plain Euclidean dot product; no length checking.
pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm2(u: &[f64]) -> f64 {
    crate::fmath::sqrt(dot(u, u))
}

/// Weighted inner product `w * sum u_j v_j`.
///
/// Symmetric and bilinear; errors if the lengths differ.
pub fn weighted_dot(u: &[f64], v: &[f64], weight: InnerProductWeight) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    if u.is_empty() {
        return Err(Error::InvalidInput("weighted_dot requires length >= 1"));
    }
    Ok(weight.factor(u.len()) * dot(u, v))
}

/// Norm induced by [`weighted_dot`]: `sqrt(w) * ||u||_2`.
pub fn weighted_norm(u: &[f64], weight: InnerProductWeight) -> f64 {
    crate::fmath::sqrt(weight.factor(u.len())) * norm2(u)
}
