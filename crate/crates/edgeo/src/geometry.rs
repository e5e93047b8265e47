//! Point configurations, squared distance matrices, Gower double-centering,
//! classical MDS, and rigid-motion-invariant evaluation.
//!
//! Conventions: points are columns. A configuration of `p` points in `r`
//! dimensions is an `r x p` matrix with the first `m` columns designated as
//! anchors and the remaining `n = p - m` as mobiles. Distance matrices hold
//! *squared* Euclidean distances.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default relative tolerance for the Schoenberg PSD test in [`validate_edm`].
pub const DEFAULT_EDM_TOL: f64 = 1e-9;

fn validation_tol<T: Scalar>(max_abs: T) -> T {
    T::default_epsilon().sqrt() * (T::one() + max_abs)
}

fn max_abs<T: Scalar>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

fn check_symmetric<T: Scalar>(m: &DMatrix<T>, context: &'static str) -> Result<()> {
    let tol = validation_tol(max_abs(m));
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if worst > tol {
        return Err(Error::Asymmetric {
            context,
            deviation: worst.to_double(),
        });
    }
    Ok(())
}

/// A configuration of `p` points in `r` dimensions with an anchor/mobile
/// split after column `m`. Columns `0..m` are anchors, `m..p` mobiles.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig<T: Scalar> {
    coords: DMatrix<T>,
    split: usize,
}

impl<T: Scalar> PointConfig<T> {
    pub fn new(coords: DMatrix<T>, split: usize) -> Result<Self> {
        if coords.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        let p = coords.ncols();
        if split == 0 || split >= p {
            return Err(Error::InvalidSplit { m: split, p });
        }
        Ok(Self { coords, split })
    }

    /// Number of coordinate dimensions `r`.
    pub fn dims(&self) -> usize {
        self.coords.nrows()
    }

    /// Total point count `p`.
    pub fn len(&self) -> usize {
        self.coords.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.ncols() == 0
    }

    /// Anchor count `m`.
    pub fn split(&self) -> usize {
        self.split
    }

    /// Mobile count `n = p - m`.
    pub fn mobile_len(&self) -> usize {
        self.len() - self.split
    }

    pub fn coords(&self) -> &DMatrix<T> {
        &self.coords
    }

    /// The anchor block `X` (`r x m`).
    pub fn anchors(&self) -> DMatrix<T> {
        self.coords.columns(0, self.split).into_owned()
    }

    /// The mobile block `Y` (`r x n`).
    pub fn mobiles(&self) -> DMatrix<T> {
        self.coords
            .columns(self.split, self.mobile_len())
            .into_owned()
    }

    /// Largest pairwise distance; useful as a scale for error thresholds.
    pub fn diameter(&self) -> T {
        let p = self.len();
        let mut best = T::zero();
        for i in 0..p {
            for j in (i + 1)..p {
                let d = (self.coords.column(i) - self.coords.column(j)).norm();
                best = best.max(d);
            }
        }
        best
    }
}

/// Squared Euclidean distance matrix over `p` points with the same
/// anchor/mobile split as the configuration it came from.
///
/// Block names follow the usual anchored layout:
/// `E` anchor-anchor (`m x m`), `F` anchor-mobile (`m x n`),
/// `G` mobile-mobile (`n x n`).
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistanceMatrix<T: Scalar> {
    entries: DMatrix<T>,
    split: usize,
}

impl<T: Scalar> SquaredDistanceMatrix<T> {
    pub fn new(entries: DMatrix<T>, split: usize) -> Result<Self> {
        let p = entries.nrows();
        if entries.ncols() != p {
            return Err(Error::ShapeMismatch {
                context: "squared distance matrix",
                expected_rows: p,
                expected_cols: p,
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if split == 0 || split >= p {
            return Err(Error::InvalidSplit { m: split, p });
        }
        check_symmetric(&entries, "squared distance matrix")?;
        let tol = validation_tol(max_abs(&entries));
        for i in 0..p {
            if entries[(i, i)].abs() > tol {
                return Err(Error::NonzeroDiagonal {
                    deviation: entries[(i, i)].to_double(),
                });
            }
        }
        for i in 0..p {
            for j in 0..p {
                if entries[(i, j)] < -tol {
                    return Err(Error::NegativeDistance {
                        row: i,
                        col: j,
                        value: entries[(i, j)].to_double(),
                    });
                }
            }
        }
        Ok(Self { entries, split })
    }

    pub(crate) fn from_parts(entries: DMatrix<T>, split: usize) -> Self {
        Self { entries, split }
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn mobile_len(&self) -> usize {
        self.len() - self.split
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.entries
    }

    /// Anchor-anchor block `E` (`m x m`).
    pub fn e_block(&self) -> DMatrix<T> {
        self.entries.view((0, 0), (self.split, self.split)).into_owned()
    }

    /// Anchor-mobile block `F` (`m x n`).
    pub fn f_block(&self) -> DMatrix<T> {
        self.entries
            .view((0, self.split), (self.split, self.mobile_len()))
            .into_owned()
    }

    /// Mobile-mobile block `G` (`n x n`).
    pub fn g_block(&self) -> DMatrix<T> {
        let n = self.mobile_len();
        self.entries.view((self.split, self.split), (n, n)).into_owned()
    }

    /// The first `m` rows (all of `E` and `F`); everything the anchored
    /// observation model is allowed to see.
    pub fn anchor_rows(&self) -> DMatrix<T> {
        self.entries.rows(0, self.split).into_owned()
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries.norm()
    }
}

/// Gram matrix over `p` points with block names `A` (`m x m`),
/// `B` (`m x n`), `C` (`n x n`).
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T: Scalar> {
    entries: DMatrix<T>,
    split: usize,
}

impl<T: Scalar> GramMatrix<T> {
    pub fn new(entries: DMatrix<T>, split: usize) -> Result<Self> {
        let p = entries.nrows();
        if entries.ncols() != p {
            return Err(Error::ShapeMismatch {
                context: "Gram matrix",
                expected_rows: p,
                expected_cols: p,
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if split == 0 || split >= p {
            return Err(Error::InvalidSplit { m: split, p });
        }
        check_symmetric(&entries, "Gram matrix")?;
        Ok(Self { entries, split })
    }

    pub(crate) fn from_parts(entries: DMatrix<T>, split: usize) -> Self {
        Self { entries, split }
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn mobile_len(&self) -> usize {
        self.len() - self.split
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.entries
    }

    /// Anchor-anchor block `A` (`m x m`).
    pub fn a_block(&self) -> DMatrix<T> {
        self.entries.view((0, 0), (self.split, self.split)).into_owned()
    }

    /// Anchor-mobile block `B` (`m x n`).
    pub fn b_block(&self) -> DMatrix<T> {
        self.entries
            .view((0, self.split), (self.split, self.mobile_len()))
            .into_owned()
    }

    /// Mobile-mobile block `C` (`n x n`).
    pub fn c_block(&self) -> DMatrix<T> {
        let n = self.mobile_len();
        self.entries.view((self.split, self.split), (n, n)).into_owned()
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries.norm()
    }
}

/// A centering vector: any real vector whose entries sum to 1.
///
/// Double-centering with `s` produces a Gram matrix of points translated so
/// that `P s = 0`, i.e. the origin sits at the `s`-weighted barycenter.
/// Entries may be negative or zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringVector<T: Scalar> {
    weights: DVector<T>,
}

impl<T: Scalar> CenteringVector<T> {
    /// Sum tolerance at construction: 1e-12, loosened only when the scalar
    /// type cannot represent it (f32) or the vector is very long.
    fn sum_tol(p: usize) -> T {
        T::from_double(1e-12).max(T::default_epsilon() * T::from_count(16 * p.max(1)))
    }

    pub fn new(weights: DVector<T>) -> Result<Self> {
        let sum = weights.sum();
        let dev = sum - T::one();
        let tol = Self::sum_tol(weights.len());
        if dev.abs() > tol {
            return Err(Error::CenteringSum {
                deviation: dev.abs().to_double(),
                sign: if dev >= T::zero() { '+' } else { '-' },
                tol: tol.to_double(),
            });
        }
        Ok(Self { weights })
    }

    /// Uniform centering `s = 1/p`; reproduces the classical MDS centering
    /// matrix `J = I - (1/p) 1 1^T`.
    pub fn uniform(p: usize) -> Self {
        let w = T::one() / T::from_count(p);
        Self {
            weights: DVector::from_element(p, w),
        }
    }

    /// Nystrom centering: `1/m` on the first `m` entries, zero elsewhere.
    /// Centers the configuration at the anchor centroid.
    pub fn nystrom(m: usize, p: usize) -> Result<Self> {
        if m == 0 || m > p {
            return Err(Error::InvalidSplit { m, p });
        }
        let w = T::one() / T::from_count(m);
        let weights = DVector::from_fn(p, |i, _| if i < m { w } else { T::zero() });
        Ok(Self { weights })
    }

    /// Point mass at index `i`: pins point `i` to the origin.
    pub fn point_mass(i: usize, p: usize) -> Result<Self> {
        if i >= p {
            return Err(Error::IndexOutOfRange {
                what: "centering point",
                index: i,
                bound: p,
            });
        }
        let weights = DVector::from_fn(p, |k, _| if k == i { T::one() } else { T::zero() });
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &DVector<T> {
        &self.weights
    }

    pub fn norm_squared(&self) -> T {
        self.weights.norm_squared()
    }
}

/// Squared Euclidean distance matrix of a configuration.
pub fn squared_edm<T: Scalar>(points: &PointConfig<T>) -> SquaredDistanceMatrix<T> {
    let p = points.len();
    let mut entries = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let d = (points.coords().column(i) - points.coords().column(j)).norm_squared();
            entries[(i, j)] = d;
            entries[(j, i)] = d;
        }
    }
    SquaredDistanceMatrix::from_parts(entries, points.split())
}

/// Gower double-centering: `K = -1/2 (I - 1 s^T) D (I - s 1^T)`.
///
/// The result satisfies `K s = 0` and regenerates `D` through
/// `K_ii + K_jj - 2 K_ij = D_ij` for any valid `s`.
pub fn double_center<T: Scalar>(
    d: &SquaredDistanceMatrix<T>,
    s: &CenteringVector<T>,
) -> Result<GramMatrix<T>> {
    let p = d.len();
    if s.len() != p {
        return Err(Error::ShapeMismatch {
            context: "centering vector",
            expected_rows: p,
            expected_cols: 1,
            rows: s.len(),
            cols: 1,
        });
    }
    // K_ij = -1/2 (D_ij - (Ds)_i - (Ds)_j + s^T D s), using symmetry of D.
    let u = d.matrix() * s.weights();
    let sigma = s.weights().dot(&u);
    let half = T::from_double(0.5);
    let mut k = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let v = -half * (d.matrix()[(i, j)] - u[i] - u[j] + sigma);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(GramMatrix::from_parts(k, d.split()))
}

/// Classical MDS embedding: the `r`-truncated spectral factorization of `K`.
///
/// Eigenvalues are sorted descending (ties broken by original index) and
/// negative ones are clamped to zero before the square root, so round-off
/// negatives in noiseless data cannot poison the coordinates.
pub fn mds_embed<T: Scalar>(k: &GramMatrix<T>, r: usize) -> Result<PointConfig<T>> {
    let coords = embed_symmetric(k.matrix(), r)?;
    PointConfig::new(coords, k.split())
}

/// Spectral coordinates of a bare symmetric matrix, without the
/// anchor/mobile bookkeeping; the workhorse behind [`mds_embed`] and the
/// anchor-only embedding in the solvers.
pub fn embed_symmetric<T: Scalar>(k: &DMatrix<T>, r: usize) -> Result<DMatrix<T>> {
    let p = k.nrows();
    if r == 0 {
        return Err(Error::EmptyDimension);
    }
    if r > p {
        return Err(Error::EmbeddingDimension { r, p });
    }
    let eig = SymmetricEigen::new(k.clone());
    let order = sorted_eigen_order(&eig.eigenvalues);
    let mut coords = DMatrix::zeros(r, p);
    for (row, &idx) in order.iter().take(r).enumerate() {
        let lambda = eig.eigenvalues[idx].max(T::zero());
        let scale = lambda.sqrt();
        for col in 0..p {
            coords[(row, col)] = scale * eig.eigenvectors[(col, idx)];
        }
    }
    Ok(coords)
}

/// Indices of eigenvalues in descending order, ties broken by original index.
pub(crate) fn sorted_eigen_order<T: Scalar>(values: &DVector<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Squared distances of the embedded points from the origin chosen by `s`:
/// `-1/2 (s^T D s) 1 + D s`. Equals the diagonal of [`double_center`].
pub fn gower_origin_distances<T: Scalar>(
    d: &SquaredDistanceMatrix<T>,
    s: &CenteringVector<T>,
) -> Result<DVector<T>> {
    let p = d.len();
    if s.len() != p {
        return Err(Error::ShapeMismatch {
            context: "centering vector",
            expected_rows: p,
            expected_cols: 1,
            rows: s.len(),
            cols: 1,
        });
    }
    let u = d.matrix() * s.weights();
    let sigma = s.weights().dot(&u);
    let half = T::from_double(0.5);
    Ok(DVector::from_fn(p, |i, _| u[i] - half * sigma))
}

/// Schoenberg criterion: `D` is a squared EDM iff `-1/2 J D J` is positive
/// semidefinite. Returns true when the minimum eigenvalue is at least
/// `-tol * ||D||_F`.
pub fn validate_edm<T: Scalar>(d: &SquaredDistanceMatrix<T>, tol: T) -> bool {
    let s = CenteringVector::uniform(d.len());
    let k = double_center(d, &s).expect("uniform centering always matches");
    let eig = SymmetricEigen::new(k.matrix().clone());
    let min = eig
        .eigenvalues
        .iter()
        .fold(T::zero(), |acc, &x| acc.min(x));
    min >= -tol * d.frobenius_norm()
}

/// Optimal rigid registration (rotation or reflection plus translation) of
/// `estimate` onto `reference`, with the root-mean-square per-point error
/// after alignment.
///
/// Reflections are allowed: pairwise distances determine a configuration
/// only up to the full orthogonal group.
pub fn procrustes_align<T: Scalar>(
    estimate: &PointConfig<T>,
    reference: &PointConfig<T>,
) -> Result<(PointConfig<T>, T)> {
    if estimate.dims() != reference.dims() || estimate.len() != reference.len() {
        return Err(Error::ShapeMismatch {
            context: "procrustes alignment",
            expected_rows: reference.dims(),
            expected_cols: reference.len(),
            rows: estimate.dims(),
            cols: estimate.len(),
        });
    }
    let p = estimate.len();
    let pn = T::from_count(p);

    let est_mean = column_mean(estimate.coords());
    let ref_mean = column_mean(reference.coords());
    let est_c = subtract_column(estimate.coords(), &est_mean);
    let ref_c = subtract_column(reference.coords(), &ref_mean);

    // R = U V^T from the SVD of ref_c est_c^T maximizes trace(R^T ref_c est_c^T).
    let cross = &ref_c * est_c.transpose();
    let svd = cross.svd(true, true);
    let u = svd.u.as_ref().expect("svd computed with u");
    let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
    let rotation = u * v_t;

    let mut aligned = rotation * est_c;
    for mut col in aligned.column_iter_mut() {
        col += &ref_mean;
    }

    let mut sq_sum = T::zero();
    for j in 0..p {
        sq_sum += (aligned.column(j) - reference.coords().column(j)).norm_squared();
    }
    let rmse = (sq_sum / pn).sqrt();
    let aligned = PointConfig::new(aligned, estimate.split())?;
    Ok((aligned, rmse))
}

fn column_mean<T: Scalar>(m: &DMatrix<T>) -> DVector<T> {
    let scale = T::one() / T::from_count(m.ncols());
    let mut mean = DVector::zeros(m.nrows());
    for col in m.column_iter() {
        mean += col;
    }
    mean * scale
}

fn subtract_column<T: Scalar>(m: &DMatrix<T>, v: &DVector<T>) -> DMatrix<T> {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        col -= v;
    }
    out
}
