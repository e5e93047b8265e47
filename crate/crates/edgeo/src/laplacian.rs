//! The complete-graph Laplacian bridge between distance columns and Gram
//! columns.
//!
//! Each column of the anchor-mobile Gram block `B` is the image of a cheap
//! affine reduction of the matching distance column under the Laplacian of
//! the complete graph on the anchors: `b_j = L f~_j`. Because `L 1 = 0`,
//! differences of entries of `B` within a column depend only on observed
//! distances and the anchor block `E` — the observation map used by the
//! partial-sampling model.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Laplacian of the complete graph on `m` vertices: `m I - 1 1^T`
/// (diagonal `m - 1`, off-diagonal `-1`). Rows and columns sum to zero.
pub fn complete_graph_laplacian<T: Scalar>(m: usize) -> DMatrix<T> {
    let mf = T::from_count(m);
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            mf - T::one()
        } else {
            -T::one()
        }
    })
}

/// A distance column reduced to Laplacian preimage form:
/// `f~[s] = -1/(2m) (F[s, j] - rowmean_s(E))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedColumn<T: Scalar> {
    pub values: DVector<T>,
    pub source_column: usize,
}

/// Reduce one column of `F` against the anchor block `E`.
pub fn reduced_column<T: Scalar>(
    f_col: &DVector<T>,
    e: &DMatrix<T>,
    j: usize,
) -> Result<ReducedColumn<T>> {
    let m = f_col.len();
    if e.nrows() != m || e.ncols() != m {
        return Err(Error::ShapeMismatch {
            context: "anchor block E",
            expected_rows: m,
            expected_cols: m,
            rows: e.nrows(),
            cols: e.ncols(),
        });
    }
    let inv_m = T::one() / T::from_count(m);
    let scale = -T::from_double(0.5) * inv_m;
    let values = DVector::from_fn(m, |s, _| {
        let mut row_sum = T::zero();
        for t in 0..m {
            row_sum += e[(s, t)];
        }
        scale * (f_col[s] - inv_m * row_sum)
    });
    Ok(ReducedColumn {
        values,
        source_column: j,
    })
}

/// Map a reduced column through the Laplacian: `b_j = L f~_j`.
/// The output is the `j`-th column of the centered Gram block `B` and sums
/// to zero because `L 1 = 0`.
pub fn b_column<T: Scalar>(reduced: &ReducedColumn<T>, laplacian: &DMatrix<T>) -> DVector<T> {
    laplacian * &reduced.values
}

/// Row means of the anchor block, `(1/m) sum_t E[i, t]`; the one-time
/// precompute shared by every difference observation.
pub fn anchor_row_means<T: Scalar>(e: &DMatrix<T>) -> DVector<T> {
    let m = e.nrows();
    let inv_m = T::one() / T::from_count(m);
    DVector::from_fn(m, |i, _| {
        let mut sum = T::zero();
        for t in 0..m {
            sum += e[(i, t)];
        }
        sum * inv_m
    })
}

/// The within-column difference `B[i, j] - B[k, j]` computed from observed
/// distances alone: `-1/2 (F_ij - F_kj) + g_ik(E)` where
/// `g_ik(E) = 1/(2m) sum_t (E[i, t] - E[k, t])`.
pub fn entry_difference_observation<T: Scalar>(
    f_ij: T,
    f_kj: T,
    e: &DMatrix<T>,
    i: usize,
    k: usize,
) -> Result<T> {
    let m = e.nrows();
    if i >= m {
        return Err(Error::IndexOutOfRange {
            what: "anchor row i",
            index: i,
            bound: m,
        });
    }
    if k >= m {
        return Err(Error::IndexOutOfRange {
            what: "anchor row k",
            index: k,
            bound: m,
        });
    }
    let half = T::from_double(0.5);
    let inv_2m = half / T::from_count(m);
    let mut diff_sum = T::zero();
    for t in 0..m {
        diff_sum += e[(i, t)] - e[(k, t)];
    }
    Ok(-half * (f_ij - f_kj) + inv_2m * diff_sum)
}

/// Same observation with the row means already in hand (the solver path).
pub fn entry_difference_with_means<T: Scalar>(
    f_ij: T,
    f_kj: T,
    row_means: &DVector<T>,
    i: usize,
    k: usize,
) -> T {
    let half = T::from_double(0.5);
    -half * (f_ij - f_kj) + half * (row_means[i] - row_means[k])
}
