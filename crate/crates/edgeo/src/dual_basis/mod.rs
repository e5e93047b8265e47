//! Closed-form biorthogonal basis systems for distance-constrained matrix
//! recovery.
//!
//! Two families:
//!
//! * [`column`]: a basis of the `m x n` matrices with zero column sums,
//!   indexed by one row below the last and one column. Sampled distance
//!   observations are exactly inner products against its primal elements.
//! * [`centered`]: a basis of the `p x p` Gram matrices annihilating a given
//!   centering vector `s`, one element per point pair. The expansion
//!   coefficients of a double-centered Gram matrix are exactly the squared
//!   distances.
//!
//! [`gram`] holds the brute-force route: materialize the basis Gram matrix
//! `H` of primal inner products and synthesize duals through `H^{-1}`. It is
//! deliberately independent of the closed forms and serves as their oracle.

pub mod centered;
pub mod column;
pub mod gram;

pub use centered::{block_restricted_expansion, expand_gram, s_basis, s_dual, CenteredFamily};
pub use column::{column_basis, column_dual, ColumnFamily};
pub use gram::{basis_gram, dual_from_gram, BasisFamily, BasisGram, DENSE_GUARD};
