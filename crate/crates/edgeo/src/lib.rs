//! Anchored Euclidean distance geometry: recover point configurations from
//! partial distance measurements against a set of anchor points.
//!
//! The pipeline: squared distance blocks are double-centered into Gram
//! blocks (for any centering vector, with the Nystrom "anchor centroid"
//! vector as the workhorse), missing anchor-mobile entries are recovered
//! through a closed-form dual basis or solved directly, the mobile-mobile
//! block is filled by pseudo-inverse completion, and coordinates come out
//! of a classical MDS eigendecomposition.
//!
//! The numeric core is generic over the scalar type; `f64` aliases for the
//! main types live at the crate root.

pub mod dual_basis;
pub mod error;
pub mod geometry;
pub mod io;
pub mod laplacian;
pub mod nystrom;
pub mod sampling;
pub mod solver;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use geometry::{
    double_center, gower_origin_distances, mds_embed, procrustes_align, squared_edm,
    validate_edm, CenteringVector, GramMatrix, PointConfig, SquaredDistanceMatrix,
    DEFAULT_EDM_TOL,
};
pub use nystrom::{
    center_anchor_block, center_blocks, localize_full, nystrom_complete, Completion,
    Localization, DEFAULT_RANK_TOL,
};

/// Double-precision aliases for the core types.
pub type PointConfig64 = geometry::PointConfig<f64>;
pub type SquaredDistanceMatrix64 = geometry::SquaredDistanceMatrix<f64>;
pub type GramMatrix64 = geometry::GramMatrix<f64>;
pub type CenteringVector64 = geometry::CenteringVector<f64>;
