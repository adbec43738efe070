//! The Arnoldi process: orthonormal Krylov bases and the Hessenberg
//! projection `A V_l = V_{l+1} H_{l+1,l}`.
//!
//! Gram-Schmidt is applied twice per step (full reorthogonalization); the
//! downstream error analysis assumes an orthonormal basis, and a single pass
//! loses orthogonality at the condition numbers these systems have.

use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::{weighted_norm, DenseMatrix, DenseOperator, InnerProductWeight};
use crate::{Error, Result};

/// Relative residual threshold below which a step counts as a breakdown.
pub const DEFAULT_BREAKDOWN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct ArnoldiOptions {
    pub weight: InnerProductWeight,
    /// Breakdown when `||w|| <= breakdown_tol * ||A v_j||` after
    /// reorthogonalization.
    pub breakdown_tol: f64,
    /// Accept a decomposition truncated by early breakdown instead of
    /// returning [`Error::Breakdown`].
    pub allow_truncation: bool,
}

impl Default for ArnoldiOptions {
    fn default() -> Self {
        Self {
            weight: InnerProductWeight::Euclidean,
            breakdown_tol: DEFAULT_BREAKDOWN_TOL,
            allow_truncation: false,
        }
    }
}

/// The decomposition `A V_l = V_{l+1} H_{l+1,l}` with `V` orthonormal in the
/// chosen inner product and `H` upper Hessenberg.
///
/// On breakdown at step `j` the Krylov subspace is invariant, the relation
/// collapses to `A V_j = V_j H_{j,j}`, and both factors are returned square
/// with `breakdown = Some(j)`.
#[derive(Clone, Debug)]
pub struct ArnoldiDecomposition {
    basis: Vec<Vec<f64>>,
    h: DenseMatrix,
    steps: usize,
    weight: InnerProductWeight,
    breakdown: Option<usize>,
    n: usize,
}

impl ArnoldiDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Completed Arnoldi steps (the `l` in `H_{l+1,l}`).
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn weight(&self) -> InnerProductWeight {
        self.weight
    }

    pub fn breakdown(&self) -> Option<usize> {
        self.breakdown
    }

    /// The upper Hessenberg factor, `(l+1) x l`, or `l x l` after breakdown.
    pub fn hessenberg(&self) -> &DenseMatrix {
        &self.h
    }

    /// Number of stored basis vectors (`l+1`, or `l` after breakdown).
    pub fn basis_len(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_column(&self, j: usize) -> &[f64] {
        &self.basis[j]
    }

    /// Materializes `V` as a dense `n x basis_len` matrix.
    pub fn basis_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.basis.len(), |i, j| self.basis[j][i])
    }

    /// Coordinates of `x` against the first `count` basis vectors in the
    /// decomposition's inner product.
    pub fn coefficients(&self, x: &[f64], count: usize) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        assert!(count <= self.basis.len());
        let w = self.weight.factor(self.n);
        Ok(self.basis[..count]
            .iter()
            .map(|v| w * crate::numerics::dot(v, x))
            .collect())
    }

    /// Linear combination `sum_j c_j v_j` over the leading basis vectors.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        assert!(coeffs.len() <= self.basis.len());
        let mut out = vec![0.0; self.n];
        for (c, v) in coeffs.iter().zip(&self.basis) {
            if *c == 0.0 {
                continue;
            }
            for (o, vi) in out.iter_mut().zip(v) {
                *o += c * vi;
            }
        }
        out
    }
}

/// Runs `ell` steps of the Arnoldi process on `A` with start vector
/// `y_delta`.
///
/// `v_1 = y/||y||`, `h_{k,j} = <v_k, A v_j>`, `h_{j+1,j} = ||w||` after two
/// orthogonalization passes. A residual at or below
/// `breakdown_tol * ||A v_j||` stops the recursion; if that happens before
/// `ell` steps the call fails with [`Error::Breakdown`] unless
/// `allow_truncation` is set, in which case the truncated decomposition is
/// returned.
pub fn arnoldi(
    a: &DenseOperator,
    y_delta: &[f64],
    ell: usize,
    opts: &ArnoldiOptions,
) -> Result<ArnoldiDecomposition> {
    let n = a.n();
    if y_delta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: y_delta.len(),
        });
    }
    if ell == 0 || ell > n {
        return Err(Error::InvalidInput("arnoldi requires 1 <= ell <= n"));
    }
    if opts.breakdown_tol.is_nan() || opts.breakdown_tol < 0.0 {
        return Err(Error::InvalidInput("breakdown tolerance must be >= 0"));
    }
    let ynorm = weighted_norm(y_delta, opts.weight);
    if ynorm == 0.0 {
        return Err(Error::InvalidInput("arnoldi start vector must be nonzero"));
    }

    let wf = opts.weight.factor(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(ell + 1);
    basis.push(y_delta.iter().map(|x| x / ynorm).collect());

    let mut h = DenseMatrix::zeros(ell + 1, ell);
    let mut w = vec![0.0; n];
    for j in 0..ell {
        a.apply(&basis[j], &mut w);
        let anorm = weighted_norm(&w, opts.weight);
        for k in 0..=j {
            let hk = wf * crate::numerics::dot(&basis[k], &w);
            for (wi, vi) in w.iter_mut().zip(&basis[k]) {
                *wi -= hk * vi;
            }
            h[(k, j)] = hk;
        }
        // Second pass; the corrections fold into H.
        for k in 0..=j {
            let s = wf * crate::numerics::dot(&basis[k], &w);
            for (wi, vi) in w.iter_mut().zip(&basis[k]) {
                *wi -= s * vi;
            }
            h[(k, j)] += s;
        }
        let res = weighted_norm(&w, opts.weight);
        if res <= opts.breakdown_tol * anorm {
            let steps = j + 1;
            if steps < ell && !opts.allow_truncation {
                return Err(Error::Breakdown { step: steps });
            }
            return Ok(ArnoldiDecomposition {
                basis,
                h: DenseMatrix::from_fn(steps, steps, |r, c| h[(r, c)]),
                steps,
                weight: opts.weight,
                breakdown: Some(steps),
                n,
            });
        }
        h[(j + 1, j)] = res;
        basis.push(w.iter().map(|x| x / res).collect());
    }

    Ok(ArnoldiDecomposition {
        basis,
        h,
        steps: ell,
        weight: opts.weight,
        breakdown: None,
        n,
    })
}

/// Entrywise symmetry test: `max|a_ij - a_ji| <= tol * max|a_ij|`.
///
/// Diagnostic only; the same Arnoldi code path runs either way, but for a
/// symmetric operator the Hessenberg factor is tridiagonal up to roundoff.
pub fn is_symmetric(a: &DenseOperator, tol: f64) -> bool {
    let m = a.matrix();
    let n = a.n();
    let mut defect = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            defect = defect.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    defect <= tol * m.max_abs()
}
