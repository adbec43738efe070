//! The rank-`l` operator approximation built from an Arnoldi decomposition,
//! its approximation gap, and the orthogonal projector onto its range.
//!
//! With `A V_l = V_{l+1} H` the approximation is `A_l = V_{l+1} H V_l^T`,
//! acting as `A` restricted to the Krylov subspace: `A_l x = A V_l V_l^T x`.
//! `A_l` is never materialized as a dense `n x n` matrix except inside the
//! Frobenius-gap accumulation; everything else works through matrix-vector
//! products with the stored factors.

use alloc::vec;
use alloc::vec::Vec;

use crate::arnoldi::ArnoldiDecomposition;
use crate::numerics::{
    small_svd, spectral_norm_estimate, DenseOperator, LinearOperator, SmallSvd,
    SpectralNormOptions,
};
use crate::{Error, Result};

/// Relative singular-value cutoff used for the numerical rank of `H`.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// How the approximation gap `||A - A_l||` is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GapMethod {
    /// Largest singular value of the difference, by power iteration.
    #[default]
    Spectral,
    /// Frobenius norm of the dense difference; cheaper to reason about and an
    /// upper bound for the spectral value.
    Frobenius,
}

#[derive(Clone, Copy, Debug)]
pub struct ApproximationGap {
    pub value: f64,
    pub method: GapMethod,
}

/// `A_l = V_{l+1} H V_l^T` together with the SVD of `H` and its numerical
/// rank `q`.
#[derive(Clone, Debug)]
pub struct LowRankApproximation {
    dec: ArnoldiDecomposition,
    svd: SmallSvd,
    rank_q: usize,
    rank_tol: f64,
}

impl LowRankApproximation {
    pub fn new(dec: ArnoldiDecomposition, rank_tol: f64) -> Result<Self> {
        if rank_tol.is_nan() || rank_tol < 0.0 {
            return Err(Error::InvalidInput("rank tolerance must be >= 0"));
        }
        let svd = small_svd(dec.hessenberg())?;
        let rank_q = svd.rank(rank_tol);
        Ok(Self {
            dec,
            svd,
            rank_q,
            rank_tol,
        })
    }

    pub fn with_default_rank_tol(dec: ArnoldiDecomposition) -> Result<Self> {
        Self::new(dec, DEFAULT_RANK_TOL)
    }

    pub fn decomposition(&self) -> &ArnoldiDecomposition {
        &self.dec
    }

    pub fn svd(&self) -> &SmallSvd {
        &self.svd
    }

    /// Numerical rank `q` of the Hessenberg factor.
    pub fn rank(&self) -> usize {
        self.rank_q
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn n(&self) -> usize {
        self.dec.n()
    }

    pub fn ell(&self) -> usize {
        self.dec.steps()
    }

    /// Applies `A_l`: expand `x` in the leading `l` basis vectors, push the
    /// coordinates through `H`, and recombine over all `l+1` vectors.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let t = self.dec.coefficients(x, self.ell())?;
        let h = self.dec.hessenberg();
        let mut u = vec![0.0; h.rows()];
        h.matvec(&t, &mut u);
        Ok(self.dec.combine(&u))
    }

    /// Applies the adjoint of `A_l` in the decomposition's inner product,
    /// expressed in the same coordinates: `V_l H^T V_{l+1}^T y` with weighted
    /// coordinate extraction.
    pub fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        let c = self.dec.coefficients(y, self.dec.basis_len())?;
        let h = self.dec.hessenberg();
        let mut t = vec![0.0; h.cols()];
        h.matvec_transpose(&c, &mut t);
        Ok(self.dec.combine(&t))
    }

    /// Orthogonal projection onto `range(A_l)`:
    /// `V_{l+1} U I_q U^T V_{l+1}^T v` with `q = rank(H)`.
    pub fn project_range(&self, v: &[f64]) -> Result<Vec<f64>> {
        let c = self.dec.coefficients(v, self.dec.basis_len())?;
        let u = self.svd.u();
        let m = u.rows();
        let mut d = vec![0.0; m];
        u.matvec_transpose(&c, &mut d);
        for di in d.iter_mut().skip(self.rank_q) {
            *di = 0.0;
        }
        let mut g = vec![0.0; m];
        u.matvec(&d, &mut g);
        Ok(self.dec.combine(&g))
    }
}

/// Measures `||A - A_l||` by the requested method with default options.
pub fn approximation_gap(
    a: &DenseOperator,
    l: &LowRankApproximation,
    method: GapMethod,
) -> Result<ApproximationGap> {
    approximation_gap_with(a, l, method, &SpectralNormOptions::default())
}

/// Measures `||A - A_l||`, passing `opts` to the power iteration when the
/// spectral method is selected.
pub fn approximation_gap_with(
    a: &DenseOperator,
    l: &LowRankApproximation,
    method: GapMethod,
    opts: &SpectralNormOptions,
) -> Result<ApproximationGap> {
    if a.n() != l.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            actual: l.n(),
        });
    }
    let value = match method {
        GapMethod::Spectral => {
            let op = GapOperator { a, l };
            spectral_norm_estimate(&op, opts)?
        }
        GapMethod::Frobenius => frobenius_gap(a, l),
    };
    Ok(ApproximationGap { value, method })
}

/// Matrix-free `B = A - A_l` for the power iteration.
struct GapOperator<'a> {
    a: &'a DenseOperator,
    l: &'a LowRankApproximation,
}

impl LinearOperator for GapOperator<'_> {
    fn dim(&self) -> usize {
        self.a.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.a.apply(x, out);
        let lr = self.l.apply(x).expect("dimension checked on construction");
        for (o, v) in out.iter_mut().zip(&lr) {
            *o -= v;
        }
    }

    fn apply_transpose(&self, x: &[f64], out: &mut [f64]) {
        self.a.apply_transpose(x, out);
        let lr = self
            .l
            .apply_adjoint(x)
            .expect("dimension checked on construction");
        for (o, v) in out.iter_mut().zip(&lr) {
            *o -= v;
        }
    }
}

/// `||A - A_l||_F` accumulated one row at a time; `A_l` rows are rebuilt from
/// the factors so no `n x n` intermediate is stored.
fn frobenius_gap(a: &DenseOperator, l: &LowRankApproximation) -> f64 {
    let n = a.n();
    let dec = l.decomposition();
    let h = dec.hessenberg();
    let ell = h.cols();
    let wf = dec.weight().factor(n);
    // G = V_{l+1} H, n x l.
    let mut g = vec![vec![0.0; n]; ell];
    for (k, gk) in g.iter_mut().enumerate() {
        for t in 0..h.rows() {
            let htk = h[(t, k)];
            if htk == 0.0 {
                continue;
            }
            for (gi, vi) in gk.iter_mut().zip(dec.basis_column(t)) {
                *gi += htk * vi;
            }
        }
    }
    let mut sum = 0.0;
    let mut row = vec![0.0; n];
    for i in 0..n {
        row.fill(0.0);
        for (k, gk) in g.iter().enumerate() {
            let gik = wf * gk[i];
            if gik == 0.0 {
                continue;
            }
            for (r, v) in row.iter_mut().zip(dec.basis_column(k)) {
                *r += gik * v;
            }
        }
        for (j, r) in row.iter().enumerate() {
            let d = a.matrix()[(i, j)] - r;
            sum += d * d;
        }
    }
    crate::fmath::sqrt(sum)
}
