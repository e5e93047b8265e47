//! Basis and dual basis for Gram matrices centered anywhere.
//!
//! For a centering vector `s` (entries summing to one), the symmetric
//! matrices `X` with `X s = 0` contain every Gram matrix produced by
//! double-centering with `s`. One basis element per point pair `(i, j)`,
//! `i < j`:
//!
//! * primal: `w_{i,j} = a a^T` with
//!   `a = e_i - ((s_i - s_j)/||s||^2) s - e_j` — rank one, PSD, `w s = 0`,
//!   and `<X, w_{i,j}> = D_{i,j}` whenever `X` double-centers `D` with `s`;
//! * dual: `v_{i,j} = -1/2 (c d^T + d c^T)` with `c = e_i - s_i 1`,
//!   `d = e_j - s_j 1`.
//!
//! With uniform `s` the primal reduces to the familiar origin-centered
//! element `(e_i - e_j)(e_i - e_j)^T`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{CenteringVector, GramMatrix};
use crate::scalar::Scalar;

/// The pair-indexed basis family attached to one centering vector.
#[derive(Debug, Clone)]
pub struct CenteredFamily<T: Scalar> {
    s: CenteringVector<T>,
    norm_sq: T,
}

impl<T: Scalar> CenteredFamily<T> {
    pub fn new(s: CenteringVector<T>) -> Self {
        // Cauchy-Schwarz on sum(s) = 1 gives ||s||^2 >= 1/p, never zero.
        let norm_sq = s.norm_squared();
        Self { s, norm_sq }
    }

    pub fn dim(&self) -> usize {
        self.s.len()
    }

    /// Number of basis elements, `p (p - 1) / 2`.
    pub fn len(&self) -> usize {
        let p = self.dim();
        p * (p - 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn centering(&self) -> &CenteringVector<T> {
        &self.s
    }

    /// Flat index of the pair `(i, j)`, `i < j`, in lexicographic order.
    pub fn index_of(&self, i: usize, j: usize) -> Result<usize> {
        self.check(i, j)?;
        let p = self.dim();
        // Pairs (0,1), (0,2), ..., (0,p-1), (1,2), ...
        Ok(i * p - i * (i + 1) / 2 + (j - i - 1))
    }

    pub fn pair_of(&self, alpha: usize) -> Result<(usize, usize)> {
        if alpha >= self.len() {
            return Err(Error::IndexOutOfRange {
                what: "basis element",
                index: alpha,
                bound: self.len(),
            });
        }
        let p = self.dim();
        let mut rest = alpha;
        for i in 0..p {
            let row = p - i - 1;
            if rest < row {
                return Ok((i, i + 1 + rest));
            }
            rest -= row;
        }
        unreachable!("alpha bound checked above")
    }

    fn check(&self, i: usize, j: usize) -> Result<()> {
        if i >= j || j >= self.dim() {
            return Err(Error::BasisIndex { i, j });
        }
        Ok(())
    }

    /// The rank-one factor `a = e_i - ((s_i - s_j)/||s||^2) s - e_j`.
    pub fn basis_vector(&self, i: usize, j: usize) -> Result<DVector<T>> {
        self.check(i, j)?;
        let s = self.s.weights();
        let t = (s[i] - s[j]) / self.norm_sq;
        let mut a = s * -t;
        a[i] += T::one();
        a[j] -= T::one();
        Ok(a)
    }

    /// Dense primal element `w_{i,j} = a a^T`.
    pub fn primal(&self, i: usize, j: usize) -> Result<DMatrix<T>> {
        let a = self.basis_vector(i, j)?;
        Ok(&a * a.transpose())
    }

    /// Dense dual element `v_{i,j} = -1/2 (c d^T + d c^T)`.
    pub fn dual(&self, i: usize, j: usize) -> Result<DMatrix<T>> {
        self.check(i, j)?;
        let s = self.s.weights();
        let p = self.dim();
        let half = T::from_double(0.5);
        let mut v = DMatrix::zeros(p, p);
        // c = e_i - s_i 1, d = e_j - s_j 1, expanded entrywise.
        for k in 0..p {
            let ck = delta::<T>(k, i) - s[i];
            for l in 0..p {
                let dl = delta::<T>(l, j) - s[j];
                let dk = delta::<T>(k, j) - s[j];
                let cl = delta::<T>(l, i) - s[i];
                v[(k, l)] = -half * (ck * dl + dk * cl);
            }
        }
        Ok(v)
    }

    /// `<X, w_{i,j}>` through the structured form
    /// `a^T X a = X_ii + X_jj - 2 X_ij - 2 t ((Xs)_i - (Xs)_j) + t^2 s^T X s`,
    /// avoiding the dense element.
    pub fn primal_inner(&self, x: &DMatrix<T>, i: usize, j: usize) -> Result<T> {
        self.check(i, j)?;
        let p = self.dim();
        if x.nrows() != p || x.ncols() != p {
            return Err(Error::ShapeMismatch {
                context: "centered family inner product",
                expected_rows: p,
                expected_cols: p,
                rows: x.nrows(),
                cols: x.ncols(),
            });
        }
        let xs = x * self.s.weights();
        let sxs = self.s.weights().dot(&xs);
        Ok(self.inner_with_cache(x, &xs, sxs, i, j))
    }

    fn inner_with_cache(&self, x: &DMatrix<T>, xs: &DVector<T>, sxs: T, i: usize, j: usize) -> T {
        let s = self.s.weights();
        let t = (s[i] - s[j]) / self.norm_sq;
        let two = T::from_double(2.0);
        x[(i, i)] + x[(j, j)] - two * x[(i, j)] - two * t * (xs[i] - xs[j]) + t * t * sxs
    }

    /// All expansion coefficients `<X, w_alpha>` in flat index order, with
    /// the `X s` products computed once.
    pub fn coefficients(&self, x: &DMatrix<T>) -> Result<Vec<T>> {
        let p = self.dim();
        if x.nrows() != p || x.ncols() != p {
            return Err(Error::ShapeMismatch {
                context: "centered family coefficients",
                expected_rows: p,
                expected_cols: p,
                rows: x.nrows(),
                cols: x.ncols(),
            });
        }
        let xs = x * self.s.weights();
        let sxs = self.s.weights().dot(&xs);
        let mut out = Vec::with_capacity(self.len());
        for i in 0..p {
            for j in (i + 1)..p {
                out.push(self.inner_with_cache(x, &xs, sxs, i, j));
            }
        }
        Ok(out)
    }

    /// Dual expansion `sum_alpha c_alpha v_alpha` accumulated from the
    /// rank-two outer products.
    pub fn expand(&self, coefficients: &[T]) -> Result<DMatrix<T>> {
        if coefficients.len() != self.len() {
            return Err(Error::ShapeMismatch {
                context: "centered family coefficients",
                expected_rows: self.len(),
                expected_cols: 1,
                rows: coefficients.len(),
                cols: 1,
            });
        }
        let p = self.dim();
        let s = self.s.weights();
        let half = T::from_double(0.5);
        let mut out = DMatrix::zeros(p, p);
        let mut alpha = 0;
        for i in 0..p {
            for j in (i + 1)..p {
                let c = -half * coefficients[alpha];
                alpha += 1;
                if c == T::zero() {
                    continue;
                }
                for k in 0..p {
                    let ck = delta::<T>(k, i) - s[i];
                    let dk = delta::<T>(k, j) - s[j];
                    for l in 0..p {
                        let dl = delta::<T>(l, j) - s[j];
                        let cl = delta::<T>(l, i) - s[i];
                        out[(k, l)] += c * (ck * dl + dk * cl);
                    }
                }
            }
        }
        Ok(out)
    }
}

fn delta<T: Scalar>(a: usize, b: usize) -> T {
    if a == b {
        T::one()
    } else {
        T::zero()
    }
}

/// Standalone primal element of the `s`-centered family.
pub fn s_basis<T: Scalar>(i: usize, j: usize, s: &CenteringVector<T>) -> Result<DMatrix<T>> {
    CenteredFamily::new(s.clone()).primal(i, j)
}

/// Standalone dual element of the `s`-centered family.
pub fn s_dual<T: Scalar>(i: usize, j: usize, s: &CenteringVector<T>) -> Result<DMatrix<T>> {
    CenteredFamily::new(s.clone()).dual(i, j)
}

/// Rebuild a Gram matrix from squared-distance coefficients via the dual
/// expansion `K = sum_{i<j} D_{i,j} v_{i,j}`.
///
/// Every pair `i < j` must be present in `coefficients`. The `split` is
/// carried into the returned Gram matrix unchanged.
pub fn expand_gram<T: Scalar>(
    coefficients: &BTreeMap<(usize, usize), T>,
    s: &CenteringVector<T>,
    split: usize,
) -> Result<GramMatrix<T>> {
    let family = CenteredFamily::new(s.clone());
    let p = family.dim();
    let mut flat = Vec::with_capacity(family.len());
    for i in 0..p {
        for j in (i + 1)..p {
            let c = coefficients
                .get(&(i, j))
                .copied()
                .ok_or(Error::MissingCoefficient { i, j })?;
            flat.push(c);
        }
    }
    let k = family.expand(&flat)?;
    GramMatrix::new(k, split)
}

/// Block-restricted dual expansion for the Nystrom centering: rebuild the
/// Gram blocks `(A, B)` directly from the distance blocks `(E, F)`.
///
/// Pairs inside the anchor set contribute to both blocks, anchor-mobile
/// pairs only to `B`, and mobile-mobile pairs to neither — their dual
/// elements vanish on the first `m` rows, which is why no mobile-mobile
/// distance is ever needed.
pub fn block_restricted_expansion<T: Scalar>(
    e: &DMatrix<T>,
    f: &DMatrix<T>,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let m = e.nrows();
    if e.ncols() != m {
        return Err(Error::ShapeMismatch {
            context: "anchor block E",
            expected_rows: m,
            expected_cols: m,
            rows: e.nrows(),
            cols: e.ncols(),
        });
    }
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
    let half = T::from_double(0.5);

    // Restriction of c_k = e_k - (1/m) 1 to the anchor rows.
    let tilde = |k: usize| {
        let mut v = DVector::from_element(m, -inv_m);
        v[k] += T::one();
        v
    };

    let mut a = DMatrix::zeros(m, m);
    let mut b = DMatrix::zeros(m, n);

    // Anchor-anchor pairs i < j < m, coefficient E[i, j].
    for i in 0..m {
        let ci = tilde(i);
        for j in (i + 1)..m {
            let cj = tilde(j);
            let coeff = e[(i, j)];
            if coeff != T::zero() {
                // A gets -1/2 (c_i c_j^T + c_j c_i^T).
                for k in 0..m {
                    for l in 0..m {
                        a[(k, l)] -= half * coeff * (ci[k] * cj[l] + cj[k] * ci[l]);
                    }
                }
                // The mobile-side restriction of both c and d is -(1/m) 1,
                // so B gets (1/(2m)) (c_i + c_j) 1^T.
                for k in 0..m {
                    let add = half * inv_m * coeff * (ci[k] + cj[k]);
                    for l in 0..n {
                        b[(k, l)] += add;
                    }
                }
            }
        }
    }

    // Anchor-mobile pairs i < m <= j, coefficient F[i, j - m]; only B moves.
    for i in 0..m {
        let ci = tilde(i);
        for col in 0..n {
            let coeff = f[(i, col)];
            if coeff != T::zero() {
                for k in 0..m {
                    b[(k, col)] -= half * coeff * ci[k];
                }
            }
        }
    }

    Ok((a, b))
}
