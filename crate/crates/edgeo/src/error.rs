//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid anchor split m={m} for {p} points (need 1 <= m < p)")]
    InvalidSplit { m: usize, p: usize },

    #[error("point configuration needs at least one coordinate dimension")]
    EmptyDimension,

    #[error("centering vector entries sum to 1{sign}{deviation:.3e}, outside tolerance {tol:.3e}")]
    CenteringSum {
        deviation: f64,
        sign: char,
        tol: f64,
    },

    #[error("{context}: matrix is not symmetric (max |M - M^T| = {deviation:.3e})")]
    Asymmetric {
        context: &'static str,
        deviation: f64,
    },

    #[error("squared distance matrix has nonzero diagonal (max |d_ii| = {deviation:.3e})")]
    NonzeroDiagonal { deviation: f64 },

    #[error("squared distance matrix has negative entry {value:.3e} at ({row}, {col})")]
    NegativeDistance { row: usize, col: usize, value: f64 },

    #[error("embedding dimension r={r} exceeds point count p={p}")]
    EmbeddingDimension { r: usize, p: usize },

    #[error("{context}: expected {expected_rows}x{expected_cols}, found {rows}x{cols}")]
    ShapeMismatch {
        context: &'static str,
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:.3e} below threshold {threshold:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("sampling rate {rate} outside (0, 1]")]
    RateOutOfRange { rate: f64 },

    #[error("basis family of size {len} exceeds dense-inversion guard {limit}")]
    BasisTooLarge { len: usize, limit: usize },

    #[error("basis Gram matrix is numerically singular")]
    SingularBasisGram,

    #[error("basis element indices (i={i}, j={j}) invalid for this family")]
    BasisIndex { i: usize, j: usize },

    #[error("missing expansion coefficient for pair (i={i}, j={j})")]
    MissingCoefficient { i: usize, j: usize },

    #[error("duplicate sample at (row {row}, col {col}) with conflicting values")]
    InconsistentSample { row: usize, col: usize },

    #[error("anchor differences span only {rank} dimension(s); {needed} required for the anchored solve")]
    AnchorsRankDeficient { rank: usize, needed: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    InvalidData(String),
}
