//! Nystrom completion for anchored distance matrices.
//!
//! Given the anchor-anchor block `E` and anchor-mobile block `F` of a
//! squared distance matrix, Platt's block centering produces the matching
//! Gram blocks `A` and `B`; the unseen mobile-mobile Gram block is then
//! filled with the pseudo-inverse completion `C = B^T A^+ B`, which is exact
//! whenever the anchors span the configuration.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{mds_embed, sorted_eigen_order, GramMatrix, PointConfig};
use crate::scalar::Scalar;

/// Default relative eigenvalue cutoff for the pseudo-inverse of `A`.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Block centering of the anchor-anchor block alone:
/// `A_ij = -1/2 (E_ij - colmean_j(E) - rowmean_i(E) + grandmean(E))`.
///
/// This is the `(1,1)` block of double-centering with the Nystrom vector,
/// and it needs no distances to mobile points.
pub fn center_anchor_block<T: Scalar>(e: &DMatrix<T>) -> Result<DMatrix<T>> {
    let m = e.nrows();
    if m == 0 {
        return Err(Error::EmptyDimension);
    }
    if e.ncols() != m {
        return Err(Error::ShapeMismatch {
            context: "anchor block E",
            expected_rows: m,
            expected_cols: m,
            rows: e.nrows(),
            cols: e.ncols(),
        });
    }
    let inv_m = T::one() / T::from_count(m);
    let row_means = row_means(e);
    let grand = row_means.iter().fold(T::zero(), |acc, &x| acc + x) * inv_m;
    let half = T::from_double(0.5);
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = -half * (e[(i, j)] - row_means[j] - row_means[i] + grand);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok(a)
}

/// Platt's block centering: Gram blocks `(A, B)` from distance blocks
/// `(E, F)`.
///
/// `B_ij = -1/2 (F_ij - colmean_j(F) - rowmean_i(E) + grandmean(E))`.
/// Both outputs are centered at the anchor centroid, so `A 1 = 0` and every
/// column of `B` sums to zero.
pub fn center_blocks<T: Scalar>(
    e: &DMatrix<T>,
    f: &DMatrix<T>,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let m = e.nrows();
    let a = center_anchor_block(e)?;
    if f.nrows() != m {
        return Err(Error::ShapeMismatch {
            context: "anchor-mobile block F",
            expected_rows: m,
            expected_cols: f.ncols(),
            rows: f.nrows(),
            cols: f.ncols(),
        });
    }
    let n = f.ncols();
    let inv_m = T::one() / T::from_count(m);
    let e_row_means = row_means(e);
    let grand = e_row_means.iter().fold(T::zero(), |acc, &x| acc + x) * inv_m;
    let half = T::from_double(0.5);
    let mut b = DMatrix::zeros(m, n);
    for j in 0..n {
        let mut col_mean = T::zero();
        for i in 0..m {
            col_mean += f[(i, j)];
        }
        col_mean *= inv_m;
        for i in 0..m {
            b[(i, j)] = -half * (f[(i, j)] - col_mean - e_row_means[i] + grand);
        }
    }
    Ok((a, b))
}

fn row_means<T: Scalar>(e: &DMatrix<T>) -> Vec<T> {
    let m = e.nrows();
    let inv_m = T::one() / T::from_count(m);
    (0..m)
        .map(|i| {
            let mut sum = T::zero();
            for j in 0..e.ncols() {
                sum += e[(i, j)];
            }
            sum * inv_m
        })
        .collect()
}

/// Result of [`nystrom_complete`]: the filled Gram matrix plus the numerical
/// rank of `A`, which callers should compare against the target embedding
/// dimension.
#[derive(Debug, Clone)]
pub struct Completion<T: Scalar> {
    pub gram: GramMatrix<T>,
    pub rank_a: usize,
}

/// Fill the mobile-mobile Gram block: `K = [A B; B^T C]` with
/// `C = B^T A^+ B`.
///
/// The pseudo-inverse truncates eigenvalues below `rank_tol * lambda_max`.
/// An eigenvalue below `-rank_tol * lambda_max` means `A` did not come from
/// real anchor distances and is reported as an error rather than clamped.
pub fn nystrom_complete<T: Scalar>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    rank_tol: T,
) -> Result<Completion<T>> {
    let m = a.nrows();
    if a.ncols() != m {
        return Err(Error::ShapeMismatch {
            context: "Gram block A",
            expected_rows: m,
            expected_cols: m,
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if b.nrows() != m {
        return Err(Error::ShapeMismatch {
            context: "Gram block B",
            expected_rows: m,
            expected_cols: b.ncols(),
            rows: b.nrows(),
            cols: b.ncols(),
        });
    }
    let n = b.ncols();

    let eig = SymmetricEigen::new(a.clone());
    let lambda_max = eig
        .eigenvalues
        .iter()
        .fold(T::zero(), |acc, &x| acc.max(x));
    let cutoff = rank_tol * lambda_max;
    let mut rank_a = 0;
    let mut inv_values = eig.eigenvalues.clone();
    for v in inv_values.iter_mut() {
        if *v < -cutoff {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: v.to_double(),
                threshold: (-cutoff).to_double(),
            });
        }
        if *v > cutoff {
            rank_a += 1;
            *v = T::one() / *v;
        } else {
            *v = T::zero();
        }
    }

    // A^+ B without forming A^+: V diag(1/lambda) V^T B.
    let vt_b = eig.eigenvectors.transpose() * b;
    let mut scaled = vt_b;
    for i in 0..m {
        let w = inv_values[i];
        for j in 0..n {
            scaled[(i, j)] *= w;
        }
    }
    let a_pinv_b = &eig.eigenvectors * scaled;
    let c = b.transpose() * &a_pinv_b;

    let p = m + n;
    let mut k = DMatrix::zeros(p, p);
    k.view_mut((0, 0), (m, m)).copy_from(a);
    k.view_mut((0, m), (m, n)).copy_from(b);
    k.view_mut((m, 0), (n, m)).copy_from(&b.transpose());
    // Symmetrize C: B^T A^+ B is symmetric up to round-off.
    for i in 0..n {
        for j in i..n {
            let v = T::from_double(0.5) * (c[(i, j)] + c[(j, i)]);
            k[(m + i, m + j)] = v;
            k[(m + j, m + i)] = v;
        }
    }
    Ok(Completion {
        gram: GramMatrix::from_parts(k, m),
        rank_a,
    })
}

/// Result of the full-information pipeline.
#[derive(Debug, Clone)]
pub struct Localization<T: Scalar> {
    pub points: PointConfig<T>,
    pub rank_a: usize,
}

/// Full Nystrom localization from complete `E` and `F`:
/// block centering, pseudo-inverse completion, then classical MDS.
///
/// Recovery is exact (up to rigid motion) when the anchors affinely span
/// `r` dimensions; `rank_a < r` in the result signals the degenerate case.
pub fn localize_full<T: Scalar>(
    e: &DMatrix<T>,
    f: &DMatrix<T>,
    r: usize,
    rank_tol: T,
) -> Result<Localization<T>> {
    let (a, b) = center_blocks(e, f)?;
    let completion = nystrom_complete(&a, &b, rank_tol)?;
    let points = mds_embed(&completion.gram, r)?;
    Ok(Localization {
        points,
        rank_a: completion.rank_a,
    })
}

/// Numerical rank of a symmetric PSD block at a relative eigenvalue cutoff.
pub fn symmetric_rank<T: Scalar>(a: &DMatrix<T>, rank_tol: T) -> usize {
    let eig = SymmetricEigen::new(a.clone());
    let order = sorted_eigen_order(&eig.eigenvalues);
    let lambda_max = eig.eigenvalues[order[0]].max(T::zero());
    let cutoff = rank_tol * lambda_max;
    eig.eigenvalues.iter().filter(|&&v| v > cutoff).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        double_center, procrustes_align, squared_edm, CenteringVector, PointConfig,
    };
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = DMatrix<f64>;

    fn random_config(rng: &mut ChaCha8Rng, r: usize, m: usize, n: usize) -> PointConfig<f64> {
        let coords = M::from_fn(r, m + n, |_, _| rng.random_range(-1.0..1.0));
        PointConfig::new(coords, m).unwrap()
    }

    #[test]
    fn center_blocks_matches_nystrom_double_centering() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let m = rng.random_range(2..6);
            let n = rng.random_range(1..8);
            let pc = random_config(&mut rng, 2, m, n);
            let d = squared_edm(&pc);
            let s = CenteringVector::nystrom(m, m + n).unwrap();
            let k = double_center(&d, &s).unwrap();
            let (a, b) = center_blocks(&d.e_block(), &d.f_block()).unwrap();
            assert!((&a - k.a_block()).amax() <= 1e-12);
            assert!((&b - k.b_block()).amax() <= 1e-12);
        }
    }

    #[test]
    fn centered_blocks_have_zero_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pc = random_config(&mut rng, 3, 5, 12);
        let d = squared_edm(&pc);
        let (a, b) = center_blocks(&d.e_block(), &d.f_block()).unwrap();
        let ones = DVector::from_element(5, 1.0);
        assert!((&a * &ones).amax() <= 1e-12);
        for j in 0..b.ncols() {
            assert!(b.column(j).sum().abs() <= 1e-12, "column {j}");
        }
    }

    #[test]
    fn center_blocks_single_anchor_gives_zero_b() {
        // With one anchor the column mean equals the entry itself, so every
        // centered value collapses to zero.
        let e = M::zeros(1, 1);
        let f = M::from_row_slice(1, 4, &[1.0, 4.0, 9.0, 16.0]);
        let (a, b) = center_blocks(&e, &f).unwrap();
        assert_eq!(a, M::zeros(1, 1));
        assert_eq!(b, M::zeros(1, 4));
    }

    #[test]
    fn center_blocks_of_coincident_points_vanish() {
        let pc = PointConfig::new(M::from_element(2, 6, 3.0), 3).unwrap();
        let d = squared_edm(&pc);
        let (a, b) = center_blocks(&d.e_block(), &d.f_block()).unwrap();
        assert!(a.amax() == 0.0 && b.amax() == 0.0);
    }

    #[test]
    fn completion_matches_true_gram_when_anchors_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pc = random_config(&mut rng, 2, 5, 20);
        let d = squared_edm(&pc);
        let s = CenteringVector::nystrom(5, 25).unwrap();
        let k_star = double_center(&d, &s).unwrap();
        let (a, b) = center_blocks(&d.e_block(), &d.f_block()).unwrap();
        let completion = nystrom_complete(&a, &b, DEFAULT_RANK_TOL).unwrap();
        let err = (completion.gram.matrix() - k_star.matrix()).norm() / k_star.matrix().norm();
        assert!(err <= 1e-8, "relative error {err:.3e}");
        assert_eq!(completion.rank_a, 2);
    }

    #[test]
    fn completion_with_zero_b_gives_zero_c() {
        let a = M::identity(3, 3);
        let b = M::zeros(3, 4);
        let completion = nystrom_complete(&a, &b, DEFAULT_RANK_TOL).unwrap();
        assert!(completion.gram.c_block().amax() == 0.0);
    }

    #[test]
    fn completion_with_identity_a_gives_btb() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = M::identity(4, 4);
        let b = M::from_fn(4, 6, |_, _| rng.random_range(-1.0..1.0));
        let completion = nystrom_complete(&a, &b, DEFAULT_RANK_TOL).unwrap();
        let expected = b.transpose() * &b;
        assert_relative_eq!(completion.gram.c_block(), expected, epsilon = 1e-12);
    }

    #[test]
    fn completion_rejects_indefinite_a() {
        let a = M::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let b = M::zeros(2, 1);
        assert!(matches!(
            nystrom_complete(&a, &b, DEFAULT_RANK_TOL),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn localize_full_recovers_planar_configuration() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let pc = random_config(&mut rng, 2, 5, 50);
        let d = squared_edm(&pc);
        let loc = localize_full(&d.e_block(), &d.f_block(), 2, DEFAULT_RANK_TOL).unwrap();
        let (_, rmse) = procrustes_align(&loc.points, &pc).unwrap();
        assert!(rmse <= 1e-7, "rmse {rmse:.3e}");
    }

    #[test]
    fn localize_full_near_complete_information() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let pc = random_config(&mut rng, 2, 7, 1);
        let d = squared_edm(&pc);
        let loc = localize_full(&d.e_block(), &d.f_block(), 2, DEFAULT_RANK_TOL).unwrap();
        let (_, rmse) = procrustes_align(&loc.points, &pc).unwrap();
        assert!(rmse <= 1e-8, "rmse {rmse:.3e}");
    }

    #[test]
    fn localize_full_fails_on_collinear_anchors() {
        // Anchors on a line cannot pin down a planar configuration: rank(A)
        // drops below r and the completion misplaces the mobiles.
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut coords = M::from_fn(2, 9, |_, _| rng.random_range(-1.0..1.0));
        for j in 0..4 {
            coords[(1, j)] = 0.0; // anchors on the x-axis
        }
        let pc = PointConfig::new(coords, 4).unwrap();
        let d = squared_edm(&pc);
        let loc = localize_full(&d.e_block(), &d.f_block(), 2, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(loc.rank_a, 1);
        let (_, rmse) = procrustes_align(&loc.points, &pc).unwrap();
        assert!(rmse > 1e-2, "degenerate anchors should not recover: {rmse:.3e}");
    }
}
