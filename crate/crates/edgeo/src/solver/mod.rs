//! Recovery solvers over partial observations.
//!
//! Two routes to the full configuration:
//!
//! * [`anchored`]: embed the anchors from their own Gram block, then solve
//!   each mobile position from the linear systems the reduced observations
//!   induce — exact and fast whenever every column has enough samples.
//! * [`nuclear`]: recover the anchor-mobile Gram block as the minimum
//!   nuclear norm matrix consistent with the sampled constraints, then run
//!   the standard completion pipeline.

pub mod anchored;
pub mod nuclear;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{embed_symmetric, mds_embed, PointConfig};
use crate::nystrom::{center_anchor_block, nystrom_complete, symmetric_rank};
use crate::sampling::ObservationSet;
use crate::scalar::Scalar;

pub use anchored::{recover_y_anchored, AnchoredSolve};
pub use nuclear::{recover_b_nuclear, NuclearNormSolve};

/// Which solver backs [`recover_configuration`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NuclearNorm,
    AnchoredLs,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::NuclearNorm => write!(f, "nuclear_norm"),
            Method::AnchoredLs => write!(f, "anchored_ls"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nuclear_norm" => Ok(Method::NuclearNorm),
            "anchored_ls" => Ok(Method::AnchoredLs),
            other => Err(Error::InvalidData(format!(
                "unknown method '{other}' (expected nuclear_norm or anchored_ls)"
            ))),
        }
    }
}

/// Solver parameters. Tolerances are `f64` regardless of the working
/// scalar; they are converted at the point of use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    /// Iteration cap for the splitting scheme.
    pub max_iters: usize,
    /// Convergence threshold on constraint residual and iterate change.
    pub primal_tol: f64,
    /// Splitting penalty; adapted by residual balancing during the run.
    pub penalty: f64,
    /// Relative eigenvalue / singular value cutoff for rank decisions.
    pub rank_tol: f64,
    /// Target embedding dimension.
    pub r: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::AnchoredLs,
            max_iters: 5000,
            primal_tol: 1e-8,
            penalty: 1.0,
            rank_tol: 1e-10,
            r: 2,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidData("max_iters must be at least 1".into()));
        }
        for (name, value) in [
            ("primal_tol", self.primal_tol),
            ("penalty", self.penalty),
            ("rank_tol", self.rank_tol),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidData(format!(
                    "{name} must be a positive finite number, got {value}"
                )));
            }
        }
        if self.r == 0 {
            return Err(Error::InvalidData("r must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a full recovery run.
#[derive(Debug, Clone)]
pub struct RecoveryReport<T: Scalar> {
    pub method: Method,
    /// Recovered configuration, anchors first, in a common frame.
    pub points: PointConfig<T>,
    /// Nuclear norm per iterate (empty for the anchored solver).
    pub objective_history: Vec<T>,
    /// Final constraint residual (nuclear) or RMS least-squares residual
    /// (anchored).
    pub residual: T,
    /// Mobile columns solved with fewer constraints than dimensions.
    pub underdetermined_columns: Vec<usize>,
    pub wall_seconds: f64,
    pub converged: bool,
    /// Numerical rank of the anchor Gram block; below `r` means the anchors
    /// cannot pin down the configuration.
    pub rank_a: usize,
}

/// Run the configured solver end to end: anchor Gram block, mobile
/// recovery, completion, and embedding, with timing.
pub fn recover_configuration<T: Scalar>(
    obs: &ObservationSet<T>,
    cfg: &SolverConfig,
) -> Result<RecoveryReport<T>> {
    cfg.validate()?;
    let start = Instant::now();
    let m = obs.anchors();
    let n = obs.mobiles();
    let rank_tol = T::from_double(cfg.rank_tol);

    let a = center_anchor_block(obs.e())?;
    let rank_a = symmetric_rank(&a, rank_tol);

    let report = match cfg.method {
        Method::AnchoredLs => {
            let anchor_coords = embed_symmetric(&a, cfg.r)?;
            let solve = recover_y_anchored(obs, &anchor_coords, cfg)?;
            let mut coords = nalgebra::DMatrix::zeros(cfg.r, m + n);
            coords.view_mut((0, 0), (cfg.r, m)).copy_from(&anchor_coords);
            coords
                .view_mut((0, m), (cfg.r, n))
                .copy_from(&solve.mobiles);
            RecoveryReport {
                method: cfg.method,
                points: PointConfig::new(coords, m)?,
                objective_history: Vec::new(),
                residual: solve.residual,
                underdetermined_columns: solve.underdetermined,
                wall_seconds: start.elapsed().as_secs_f64(),
                converged: true,
                rank_a,
            }
        }
        Method::NuclearNorm => {
            let solve = recover_b_nuclear(obs, cfg)?;
            let completion = nystrom_complete(&a, &solve.b, rank_tol)?;
            let points = mds_embed(&completion.gram, cfg.r)?;
            let counts = obs.per_column_counts();
            let underdetermined = counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == 0)
                .map(|(j, _)| j)
                .collect();
            RecoveryReport {
                method: cfg.method,
                points,
                objective_history: solve.objective_history,
                residual: solve.constraint_residual,
                underdetermined_columns: underdetermined,
                wall_seconds: start.elapsed().as_secs_f64(),
                converged: solve.converged,
                rank_a,
            }
        }
    };
    Ok(report)
}
