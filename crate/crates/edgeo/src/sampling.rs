//! The partial observation model: all anchor-anchor distances, all
//! distances to one reference anchor, and a random subset of the remaining
//! anchor-mobile entries. Mobile-mobile distances are never touched.
//!
//! Raw samples are converted once into reduced observations
//! `F~[i, j] = -1/2 (F[i, j] - F[last, j]) + g_{i, last}(E)`, which equal
//! the Gram differences `B[i, j] - B[last, j]` and feed both solvers.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::SquaredDistanceMatrix;
use crate::laplacian::{anchor_row_means, entry_difference_with_means};
use crate::scalar::Scalar;

/// Index set of sampled anchor-mobile entries.
///
/// Rows run over `0..m-1`: the last anchor row is the fully observed
/// reference and never appears here. Columns run over `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    m: usize,
    n: usize,
    seed: u64,
    pairs: BTreeSet<(usize, usize)>,
}

impl SampleSet {
    pub fn from_pairs(
        m: usize,
        n: usize,
        seed: u64,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidSplit { m, p: m + n });
        }
        let mut set = BTreeSet::new();
        for (i, j) in pairs {
            if i + 1 >= m {
                return Err(Error::IndexOutOfRange {
                    what: "sample row",
                    index: i,
                    bound: m.saturating_sub(1),
                });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange {
                    what: "sample column",
                    index: j,
                    bound: n,
                });
            }
            set.insert((i, j));
        }
        Ok(Self {
            m,
            n,
            seed,
            pairs: set,
        })
    }

    pub fn anchors(&self) -> usize {
        self.m
    }

    pub fn mobiles(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The fully observed reference row (the last anchor).
    pub fn reference_row(&self) -> usize {
        self.m - 1
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.pairs.iter()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i, j))
    }
}

/// Bernoulli sampling: each of the `(m-1) n` candidate entries is included
/// independently with probability `rate`. Deterministic for a given seed.
pub fn draw_samples(m: usize, n: usize, rate: f64, seed: u64) -> Result<SampleSet> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::RateOutOfRange { rate });
    }
    if m < 1 {
        return Err(Error::InvalidSplit { m, p: m + n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = BTreeSet::new();
    for i in 0..m.saturating_sub(1) {
        for j in 0..n {
            if rng.random::<f64>() < rate {
                pairs.insert((i, j));
            }
        }
    }
    Ok(SampleSet { m, n, seed, pairs })
}

/// Fixed-cardinality sampling: exactly `per_column` distinct rows in every
/// column (all rows when `per_column >= m - 1`). Deterministic per seed.
pub fn draw_samples_per_column(
    m: usize,
    n: usize,
    per_column: usize,
    seed: u64,
) -> Result<SampleSet> {
    if m < 1 {
        return Err(Error::InvalidSplit { m, p: m + n });
    }
    let rows = m.saturating_sub(1);
    let take = per_column.min(rows);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = BTreeSet::new();
    for j in 0..n {
        for i in index_sample(&mut rng, rows, take) {
            pairs.insert((i, j));
        }
    }
    Ok(SampleSet { m, n, seed, pairs })
}

/// Samples per mobile column; columns with fewer than `r` entries are
/// underdetermined for the anchored solver.
pub fn per_column_counts(omega: &SampleSet) -> Vec<usize> {
    let mut counts = vec![0usize; omega.n];
    for &(_, j) in omega.pairs() {
        counts[j] += 1;
    }
    counts
}

/// Everything the solvers are allowed to see: the anchor block `E`, the
/// reference row of `F`, the sampled raw entries, and the reduced
/// observations derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet<T: Scalar> {
    e: DMatrix<T>,
    f_reference_row: DVector<T>,
    samples: BTreeMap<(usize, usize), T>,
    reduced: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> ObservationSet<T> {
    /// Assemble from raw parts, recomputing the reduced observations.
    /// Duplicate samples with conflicting values are rejected.
    pub fn from_parts(
        e: DMatrix<T>,
        f_reference_row: DVector<T>,
        raw_samples: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let m = e.nrows();
        if e.ncols() != m || m < 1 {
            return Err(Error::ShapeMismatch {
                context: "anchor block E",
                expected_rows: m,
                expected_cols: m,
                rows: e.nrows(),
                cols: e.ncols(),
            });
        }
        let n = f_reference_row.len();
        let mut samples = BTreeMap::new();
        for (i, j, value) in raw_samples {
            if i + 1 >= m {
                return Err(Error::IndexOutOfRange {
                    what: "sample row",
                    index: i,
                    bound: m.saturating_sub(1),
                });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange {
                    what: "sample column",
                    index: j,
                    bound: n,
                });
            }
            if let Some(&old) = samples.get(&(i, j)) {
                if old != value {
                    return Err(Error::InconsistentSample { row: i, col: j });
                }
            }
            samples.insert((i, j), value);
        }
        let reduced = reduce_samples(&e, &f_reference_row, &samples);
        Ok(Self {
            e,
            f_reference_row,
            samples,
            reduced,
        })
    }

    pub fn anchors(&self) -> usize {
        self.e.nrows()
    }

    pub fn mobiles(&self) -> usize {
        self.f_reference_row.len()
    }

    pub fn reference_row(&self) -> usize {
        self.anchors() - 1
    }

    pub fn e(&self) -> &DMatrix<T> {
        &self.e
    }

    /// Row `m-1` of `F`: squared distances from every mobile to the
    /// reference anchor.
    pub fn f_reference_row(&self) -> &DVector<T> {
        &self.f_reference_row
    }

    pub fn samples(&self) -> &BTreeMap<(usize, usize), T> {
        &self.samples
    }

    /// Reduced observations `F~[i, j] = B[i, j] - B[last, j]`.
    pub fn reduced(&self) -> &BTreeMap<(usize, usize), T> {
        &self.reduced
    }

    pub fn per_column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.mobiles()];
        for &(_, j) in self.samples.keys() {
            counts[j] += 1;
        }
        counts
    }

    /// Recompute the reduced observations from scratch; identical bits to
    /// the stored map by construction.
    pub fn recompute_reduced(&self) -> BTreeMap<(usize, usize), T> {
        reduce_samples(&self.e, &self.f_reference_row, &self.samples)
    }
}

fn reduce_samples<T: Scalar>(
    e: &DMatrix<T>,
    f_reference_row: &DVector<T>,
    samples: &BTreeMap<(usize, usize), T>,
) -> BTreeMap<(usize, usize), T> {
    let means = anchor_row_means(e);
    let last = e.nrows() - 1;
    samples
        .iter()
        .map(|(&(i, j), &f_ij)| {
            let value = entry_difference_with_means(f_ij, f_reference_row[j], &means, i, last);
            ((i, j), value)
        })
        .collect()
}

/// Observe a distance matrix through a sample set, reading only the anchor
/// rows (`E`, the reference row, and the sampled entries of `F`).
pub fn observe<T: Scalar>(
    d: &SquaredDistanceMatrix<T>,
    omega: &SampleSet,
) -> Result<ObservationSet<T>> {
    if d.split() != omega.anchors() || d.mobile_len() != omega.mobiles() {
        return Err(Error::ShapeMismatch {
            context: "sample set vs distance matrix",
            expected_rows: d.split(),
            expected_cols: d.mobile_len(),
            rows: omega.anchors(),
            cols: omega.mobiles(),
        });
    }
    observe_from_anchor_rows(&d.anchor_rows(), omega)
}

/// Observe from the anchor rows alone (an `m x p` slab holding `E | F`).
/// The mobile-mobile block does not exist here, so it cannot be read.
pub fn observe_from_anchor_rows<T: Scalar>(
    anchor_rows: &DMatrix<T>,
    omega: &SampleSet,
) -> Result<ObservationSet<T>> {
    let m = omega.anchors();
    let n = omega.mobiles();
    if anchor_rows.nrows() != m || anchor_rows.ncols() != m + n {
        return Err(Error::ShapeMismatch {
            context: "anchor rows",
            expected_rows: m,
            expected_cols: m + n,
            rows: anchor_rows.nrows(),
            cols: anchor_rows.ncols(),
        });
    }
    let e = anchor_rows.view((0, 0), (m, m)).into_owned();
    let f_reference_row = anchor_rows
        .view((m - 1, m), (1, n))
        .transpose()
        .column(0)
        .into_owned();
    let raw: Vec<(usize, usize, T)> = omega
        .pairs()
        .map(|&(i, j)| (i, j, anchor_rows[(i, m + j)]))
        .collect();
    ObservationSet::from_parts(e, f_reference_row, raw)
}

/// Reorder anchors so the designated one becomes the fully observed
/// reference row (the last anchor). Mobile columns are untouched.
pub fn promote_reference_anchor<T: Scalar>(
    d: &SquaredDistanceMatrix<T>,
    anchor: usize,
) -> Result<SquaredDistanceMatrix<T>> {
    let m = d.split();
    if anchor >= m {
        return Err(Error::IndexOutOfRange {
            what: "anchor",
            index: anchor,
            bound: m,
        });
    }
    let mut entries = d.matrix().clone();
    if anchor != m - 1 {
        entries.swap_rows(anchor, m - 1);
        entries.swap_columns(anchor, m - 1);
    }
    Ok(SquaredDistanceMatrix::from_parts(entries, m))
}
