//! Brute-force dual synthesis through the basis Gram matrix.
//!
//! For any finite basis `{w_alpha}`, the matrix `H[alpha, beta] =
//! <w_alpha, w_beta>` is positive definite and `v_alpha = sum_beta
//! H^{-1}[alpha, beta] w_beta` is the unique dual basis. This route only
//! needs dense primal elements and a dense solve, so it stays independent
//! of the closed-form duals and is used as their oracle in tests.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::centered::CenteredFamily;
use super::column::ColumnFamily;

/// Largest family size accepted for dense `H` work.
pub const DENSE_GUARD: usize = 5000;

/// A finite basis family that can hand out dense primal elements.
pub trait BasisFamily<T: Scalar> {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dense primal element at flat index `alpha`.
    fn element(&self, alpha: usize) -> Result<DMatrix<T>>;
}

impl<T: Scalar> BasisFamily<T> for ColumnFamily {
    fn len(&self) -> usize {
        ColumnFamily::len(self)
    }

    fn element(&self, alpha: usize) -> Result<DMatrix<T>> {
        let (i, j) = self.pair_of(alpha)?;
        self.primal(i, j)
    }
}

impl<T: Scalar> BasisFamily<T> for CenteredFamily<T> {
    fn len(&self) -> usize {
        CenteredFamily::len(self)
    }

    fn element(&self, alpha: usize) -> Result<DMatrix<T>> {
        let (i, j) = self.pair_of(alpha)?;
        self.primal(i, j)
    }
}

/// Gram matrix of a basis family: `H[alpha, beta] = <w_alpha, w_beta>`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisGram<T: Scalar> {
    matrix: DMatrix<T>,
}

impl<T: Scalar> BasisGram<T> {
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }
}

/// Materialize `H` by brute-force pairwise inner products.
pub fn basis_gram<T: Scalar>(family: &impl BasisFamily<T>) -> Result<BasisGram<T>> {
    let len = family.len();
    if len > DENSE_GUARD {
        return Err(Error::BasisTooLarge {
            len,
            limit: DENSE_GUARD,
        });
    }
    let elements: Vec<DMatrix<T>> = (0..len)
        .map(|alpha| family.element(alpha))
        .collect::<Result<_>>()?;
    let mut h = DMatrix::zeros(len, len);
    for a in 0..len {
        for b in a..len {
            let v = elements[a].dot(&elements[b]);
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }
    Ok(BasisGram { matrix: h })
}

/// Synthesize the dual element `v_alpha = sum_beta H^{-1}[alpha, beta]
/// w_beta` by a dense solve against `H`.
pub fn dual_from_gram<T: Scalar>(
    family: &impl BasisFamily<T>,
    alpha: usize,
) -> Result<DMatrix<T>> {
    let len = family.len();
    if alpha >= len {
        return Err(Error::IndexOutOfRange {
            what: "basis element",
            index: alpha,
            bound: len,
        });
    }
    let h = basis_gram(family)?;
    let chol = h
        .matrix
        .clone()
        .cholesky()
        .ok_or(Error::SingularBasisGram)?;
    let mut rhs = DMatrix::zeros(len, 1);
    rhs[(alpha, 0)] = T::one();
    let coeffs = chol.solve(&rhs);

    let mut out: Option<DMatrix<T>> = None;
    for beta in 0..len {
        let w = family.element(beta)?;
        let scaled = w * coeffs[(beta, 0)];
        out = Some(match out {
            None => scaled,
            Some(acc) => acc + scaled,
        });
    }
    out.ok_or(Error::SingularBasisGram)
}
