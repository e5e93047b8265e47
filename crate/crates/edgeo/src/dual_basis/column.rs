//! Column-centered basis for the anchor-mobile Gram block.
//!
//! The `m x n` matrices with zero column sums form an `(m-1) n` dimensional
//! space. With the last row singled out (the fully observed anchor), the
//! primal elements `w_{i,j} = e_{i,j} - e_{m-1,j}` turn within-column entry
//! differences into inner products, and their duals have the closed form
//! `v_{i,j} = e_{i,j} - (1/m) ones_j`.
//!
//! Indices are zero-based: `i` ranges over `0..m-1` (the last row is
//! excluded) and `j` over `0..n`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The basis family for `m x n` zero-column-sum matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnFamily {
    m: usize,
    n: usize,
}

impl ColumnFamily {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidSplit { m, p: m + n });
        }
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self { m, n })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// Number of basis elements, `(m - 1) n`.
    pub fn len(&self) -> usize {
        (self.m - 1) * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of `(i, j)`. Elements are enumerated column-major
    /// (`j` outer, `i` inner) so same-column elements are adjacent and the
    /// basis Gram matrix is block diagonal.
    pub fn index_of(&self, i: usize, j: usize) -> Result<usize> {
        self.check(i, j)?;
        Ok(j * (self.m - 1) + i)
    }

    pub fn pair_of(&self, alpha: usize) -> Result<(usize, usize)> {
        if alpha >= self.len() {
            return Err(Error::IndexOutOfRange {
                what: "basis element",
                index: alpha,
                bound: self.len(),
            });
        }
        Ok((alpha % (self.m - 1), alpha / (self.m - 1)))
    }

    fn check(&self, i: usize, j: usize) -> Result<()> {
        if i + 1 >= self.m || j >= self.n {
            return Err(Error::BasisIndex { i, j });
        }
        Ok(())
    }

    /// Dense primal element `w_{i,j} = e_{i,j} - e_{m-1,j}`.
    pub fn primal<T: Scalar>(&self, i: usize, j: usize) -> Result<DMatrix<T>> {
        self.check(i, j)?;
        let mut w = DMatrix::zeros(self.m, self.n);
        w[(i, j)] = T::one();
        w[(self.m - 1, j)] = -T::one();
        Ok(w)
    }

    /// Dense dual element `v_{i,j} = e_{i,j} - (1/m) ones_j`.
    pub fn dual<T: Scalar>(&self, i: usize, j: usize) -> Result<DMatrix<T>> {
        self.check(i, j)?;
        let inv_m = T::one() / T::from_count(self.m);
        let mut v = DMatrix::zeros(self.m, self.n);
        for row in 0..self.m {
            v[(row, j)] = -inv_m;
        }
        v[(i, j)] += T::one();
        Ok(v)
    }

    /// `<X, w_{i,j}> = X[i, j] - X[m-1, j]` without materializing anything.
    pub fn primal_inner<T: Scalar>(&self, x: &DMatrix<T>, i: usize, j: usize) -> Result<T> {
        self.check(i, j)?;
        if x.nrows() != self.m || x.ncols() != self.n {
            return Err(Error::ShapeMismatch {
                context: "column family inner product",
                expected_rows: self.m,
                expected_cols: self.n,
                rows: x.nrows(),
                cols: x.ncols(),
            });
        }
        Ok(x[(i, j)] - x[(self.m - 1, j)])
    }

    /// Dual expansion `sum_alpha c_alpha v_alpha` from flat coefficients.
    pub fn expand<T: Scalar>(&self, coefficients: &[T]) -> Result<DMatrix<T>> {
        if coefficients.len() != self.len() {
            return Err(Error::ShapeMismatch {
                context: "column family coefficients",
                expected_rows: self.len(),
                expected_cols: 1,
                rows: coefficients.len(),
                cols: 1,
            });
        }
        let inv_m = T::one() / T::from_count(self.m);
        let mut out = DMatrix::zeros(self.m, self.n);
        for (alpha, &c) in coefficients.iter().enumerate() {
            let (i, j) = self.pair_of(alpha)?;
            out[(i, j)] += c;
            for row in 0..self.m {
                out[(row, j)] -= c * inv_m;
            }
        }
        Ok(out)
    }
}

/// Primal element of the zero-column-sum family as a standalone call.
pub fn column_basis<T: Scalar>(i: usize, j: usize, m: usize, n: usize) -> Result<DMatrix<T>> {
    ColumnFamily::new(m, n)?.primal(i, j)
}

/// Dual element of the zero-column-sum family as a standalone call.
pub fn column_dual<T: Scalar>(i: usize, j: usize, m: usize, n: usize) -> Result<DMatrix<T>> {
    ColumnFamily::new(m, n)?.dual(i, j)
}
