//! Small dense singular value decomposition by one-sided Jacobi rotations.
//!
//! Sized for the reduced Hessenberg factors (at most a few hundred rows), not
//! for the full system matrix. The left factor is returned square so that
//! callers get an orthonormal basis of the full row space, including the
//! complement of the range.

use alloc::vec;
use alloc::vec::Vec;

use super::{dot, norm2, DenseMatrix};
use crate::{fmath, Error, Result};

/// Full singular value decomposition `H = U diag(S) W^T` of an `m x k` matrix
/// with `m >= k`.
///
/// `U` is `m x m` orthogonal, `W` is `k x k` orthogonal, and `S` holds `m`
/// nonnegative values in nonincreasing order; entries past `k` are zero, so
/// for the `(l+1) x l` Hessenberg shape the last entry is structurally zero.
#[derive(Clone, Debug)]
pub struct SmallSvd {
    u: DenseMatrix,
    singular_values: Vec<f64>,
    w: DenseMatrix,
}

impl SmallSvd {
    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn w(&self) -> &DenseMatrix {
        &self.w
    }

    /// Numerical rank: the number of singular values above `rel_tol * S[0]`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let s1 = self.singular_values[0];
        if s1 <= 0.0 {
            return 0;
        }
        self.singular_values.iter().take_while(|&&s| s > rel_tol * s1).count()
    }

    /// Rebuilds `U diag(S) W^T`; used by reconstruction checks.
    pub fn reconstruct(&self) -> DenseMatrix {
        let m = self.u.rows();
        let k = self.w.rows();
        DenseMatrix::from_fn(m, k, |i, j| {
            (0..k).map(|t| self.u[(i, t)] * self.singular_values[t] * self.w[(j, t)]).sum()
        })
    }
}

const MAX_SWEEPS: usize = 64;
const PAIR_TOL: f64 = 1e-15;

/// One-sided Jacobi SVD of an `m x k` matrix with `1 <= k <= m`.
///
/// Column pairs are rotated until mutually orthogonal; the column norms are
/// then the singular values and the accumulated rotations form `W`. Columns
/// whose norm underflows, and the `m - k` missing directions, are completed
/// to an orthonormal basis by Gram-Schmidt against the computed columns.
pub fn small_svd(h: &DenseMatrix) -> Result<SmallSvd> {
    let m = h.rows();
    let k = h.cols();
    if k == 0 || m < k {
        return Err(Error::InvalidInput("small_svd requires 1 <= cols <= rows"));
    }
    if !h.is_finite() {
        return Err(Error::InvalidInput("small_svd requires finite entries"));
    }

    // Work columns of H and of the accumulated right factor.
    let mut g: Vec<Vec<f64>> = (0..k).map(|j| h.column(j)).collect();
    let mut w: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            e
        })
        .collect();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k.saturating_sub(1) {
            for q in p + 1..k {
                let app = dot(&g[p], &g[p]);
                let aqq = dot(&g[q], &g[q]);
                let apq = dot(&g[p], &g[q]);
                if apq == 0.0 || apq * apq <= (PAIR_TOL * PAIR_TOL) * app * aqq {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + fmath::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + fmath::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / fmath::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_pair(&mut g, p, q, c, s);
                rotate_pair(&mut w, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            iterations: MAX_SWEEPS,
            best: f64::NAN,
        });
    }

    // Sort by column norm, descending.
    let mut order: Vec<usize> = (0..k).collect();
    let norms: Vec<f64> = g.iter().map(|col| norm2(col)).collect();
    order.sort_unstable_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let mut singular_values = vec![0.0; m];
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut w_sorted = DenseMatrix::zeros(k, k);
    let tiny = f64::MIN_POSITIVE;
    for (slot, &j) in order.iter().enumerate() {
        singular_values[slot] = norms[j];
        for i in 0..k {
            w_sorted[(i, slot)] = w[j][i];
        }
        if norms[j] > tiny {
            let inv = 1.0 / norms[j];
            u_cols.push(g[j].iter().map(|x| x * inv).collect());
        } else {
            singular_values[slot] = 0.0;
            u_cols.push(Vec::new()); // completed below
        }
    }
    complete_orthonormal(&mut u_cols, m);

    let mut u = DenseMatrix::zeros(m, m);
    for (j, col) in u_cols.iter().enumerate() {
        for i in 0..m {
            u[(i, j)] = col[i];
        }
    }

    Ok(SmallSvd {
        u,
        singular_values,
        w: w_sorted,
    })
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    for (a, b) in head[p].iter_mut().zip(tail[0].iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Fills empty slots and extends to `m` columns so the set is orthonormal.
fn complete_orthonormal(cols: &mut Vec<Vec<f64>>, m: usize) {
    while cols.len() < m {
        cols.push(Vec::new());
    }
    let mut candidate = 0usize;
    for j in 0..m {
        if !cols[j].is_empty() {
            continue;
        }
        loop {
            assert!(candidate < m, "orthonormal completion exhausted candidates");
            let mut v = vec![0.0; m];
            v[candidate] = 1.0;
            candidate += 1;
            // Two Gram-Schmidt passes against the existing columns.
            for _ in 0..2 {
                for col in cols.iter().filter(|c| !c.is_empty()) {
                    let s = dot(col, &v);
                    for (vi, ci) in v.iter_mut().zip(col) {
                        *vi -= s * ci;
                    }
                }
            }
            let nv = norm2(&v);
            if nv > 0.5 {
                let inv = 1.0 / nv;
                cols[j] = v.iter().map(|x| x * inv).collect();
                break;
            }
        }
    }
}
