//! Direct least-squares recovery of mobile coordinates.
//!
//! With anchors centered at their centroid, `B = X^T Y` makes every reduced
//! observation linear in the unknown mobile position:
//! `F~[i, j] = (x_i - x_last)^T y_j`. Each mobile column is an independent
//! `k x r` least-squares problem over the sampled rows — no iteration, no
//! tolerance beyond conditioning.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sampling::ObservationSet;
use crate::scalar::Scalar;

use super::SolverConfig;

/// Output of [`recover_y_anchored`].
#[derive(Debug, Clone)]
pub struct AnchoredSolve<T: Scalar> {
    /// Mobile coordinates (`r x n`) in the same frame as the anchors passed
    /// in.
    pub mobiles: DMatrix<T>,
    /// Columns whose systems had numerical rank below `r`; they carry the
    /// minimum-norm solution.
    pub underdetermined: Vec<usize>,
    /// Root-mean-square residual over all sampled constraints.
    pub residual: T,
}

/// Solve every mobile column from the reduced observations against known
/// anchor coordinates (`r x m`, columns are anchors, any frame).
///
/// Anchor differences `x_i - x_last` are translation invariant, so the
/// solve happens relative to the anchor centroid and the result is shifted
/// back into the callers' frame. Errors if the differences span fewer than
/// `r` dimensions.
pub fn recover_y_anchored<T: Scalar>(
    obs: &ObservationSet<T>,
    anchors: &DMatrix<T>,
    cfg: &SolverConfig,
) -> Result<AnchoredSolve<T>> {
    let m = obs.anchors();
    let n = obs.mobiles();
    let r = anchors.nrows();
    if anchors.ncols() != m {
        return Err(Error::ShapeMismatch {
            context: "anchor coordinates",
            expected_rows: r,
            expected_cols: m,
            rows: anchors.nrows(),
            cols: anchors.ncols(),
        });
    }
    let rank_tol = T::from_double(cfg.rank_tol);

    // Difference vectors to the reference anchor, shared by all columns.
    let last = anchors.column(m - 1).into_owned();
    let diffs: Vec<DVector<T>> = (0..m.saturating_sub(1))
        .map(|i| anchors.column(i) - &last)
        .collect();

    if m > 1 {
        let mut diff_mat = DMatrix::zeros(r, m - 1);
        for (i, d) in diffs.iter().enumerate() {
            diff_mat.set_column(i, d);
        }
        let svd = diff_mat.svd(false, false);
        let max_sv = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&sv| sv > rank_tol * max_sv)
            .count();
        if rank < r {
            return Err(Error::AnchorsRankDeficient { rank, needed: r });
        }
    } else {
        return Err(Error::AnchorsRankDeficient { rank: 0, needed: r });
    }

    // Rows of the reduced map grouped per mobile column.
    let mut per_column: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    for (&(i, j), &value) in obs.reduced() {
        per_column[j].push((i, value));
    }

    let centroid = {
        let mut c = DVector::zeros(r);
        for col in anchors.column_iter() {
            c += col;
        }
        c / T::from_count(m)
    };

    let mut mobiles = DMatrix::zeros(r, n);
    let mut underdetermined = Vec::new();
    let mut sq_residual = T::zero();
    let mut constraint_count = 0usize;

    for (j, rows) in per_column.iter().enumerate() {
        if rows.is_empty() {
            underdetermined.push(j);
            mobiles.set_column(j, &centroid);
            continue;
        }
        let k = rows.len();
        let mut system = DMatrix::zeros(k, r);
        let mut rhs = DVector::zeros(k);
        for (row_idx, &(i, value)) in rows.iter().enumerate() {
            for dim in 0..r {
                system[(row_idx, dim)] = diffs[i][dim];
            }
            rhs[row_idx] = value;
        }
        let svd = system.clone().svd(true, true);
        let max_sv = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&sv| sv > rank_tol * max_sv)
            .count();
        if rank < r {
            underdetermined.push(j);
        }
        let y = svd
            .solve(&rhs, rank_tol * max_sv)
            .map_err(|msg| Error::InvalidData(format!("column {j} solve failed: {msg}")))?;
        sq_residual += (&system * &y - &rhs).norm_squared();
        constraint_count += k;
        mobiles.set_column(j, &(y + &centroid));
    }

    let residual = if constraint_count == 0 {
        T::zero()
    } else {
        (sq_residual / T::from_count(constraint_count)).sqrt()
    };

    Ok(AnchoredSolve {
        mobiles,
        underdetermined,
        residual,
    })
}
