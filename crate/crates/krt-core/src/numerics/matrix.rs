use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `out = A x`; panics on shape mismatch.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "matvec: input length");
        assert_eq!(out.len(), self.rows, "matvec: output length");
        for (i, o) in out.iter_mut().enumerate() {
            *o = super::dot(self.row(i), x);
        }
    }

    /// `out = A^T x`; panics on shape mismatch.
    pub fn matvec_transpose(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.rows, "matvec_transpose: input length");
        assert_eq!(out.len(), self.cols, "matvec_transpose: output length");
        out.fill(0.0);
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
    }

    /// Dense product `A B`; intended for the small factors, not for `n x n` work.
    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "mul: inner dimensions");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transposed(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Square root of the sum of squared entries; an upper bound for the
    /// spectral norm.
    pub fn frobenius_norm(&self) -> f64 {
        crate::fmath::sqrt(self.data.iter().map(|x| x * x).sum())
    }
}

impl core::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// A square system matrix with finite entries, the operator being reduced.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    matrix: DenseMatrix,
}

impl DenseOperator {
    pub fn from_matrix(matrix: DenseMatrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                actual: matrix.cols(),
            });
        }
        if matrix.rows() == 0 {
            return Err(Error::InvalidInput("operator dimension must be positive"));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidInput("operator entries must be finite"));
        }
        Ok(Self { matrix })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.matrix.matvec(x, out);
    }

    pub fn apply_transpose(&self, x: &[f64], out: &mut [f64]) {
        self.matrix.matvec_transpose(x, out);
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }
}

impl super::LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        DenseOperator::apply(self, x, out);
    }

    fn apply_transpose(&self, x: &[f64], out: &mut [f64]) {
        DenseOperator::apply_transpose(self, x, out);
    }
}
