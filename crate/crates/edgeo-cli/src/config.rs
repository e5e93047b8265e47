//! JSON run configuration shared by all subcommands.
//!
//! Every key has a default; CLI flags override config keys. Validation
//! errors name the offending field.

use std::path::{Path, PathBuf};

use edgeo::solver::{Method, SolverConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// Total point count (anchors + mobiles).
    pub p: usize,
    /// Anchor count.
    pub m: usize,
    /// Embedding dimension.
    pub r: usize,
    pub seed: u64,
    /// Per-dimension [lo, hi] bounds for generated points; one pair reused
    /// for all dimensions when a single pair is given.
    pub bounds: Vec<[f64; 2]>,
    /// Bernoulli inclusion probability for sampled entries.
    pub rate: f64,
    /// Fixed per-column sample count; overrides `rate` when set.
    pub per_column: Option<usize>,
    pub method: Method,
    pub max_iters: usize,
    pub primal_tol: f64,
    pub penalty: f64,
    pub rank_tol: f64,
    /// Output directory.
    pub out: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        let solver = SolverConfig::default();
        Self {
            p: 60,
            m: 10,
            r: 2,
            seed: 0,
            bounds: vec![[0.0, 1.0]],
            rate: 1.0,
            per_column: None,
            method: solver.method,
            max_iters: solver.max_iters,
            primal_tol: solver.primal_tol,
            penalty: solver.penalty,
            rank_tol: solver.rank_tol,
            out: PathBuf::from("out"),
        }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        match path {
            None => Ok(Self::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("config {}: {e}", path.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| format!("config {}: {e}", path.display()))
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.r == 0 {
            return Err("r: must be at least 1".into());
        }
        if self.m == 0 || self.m >= self.p {
            return Err(format!("m: need 1 <= m < p, got m={} p={}", self.m, self.p));
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(format!("rate: must be in (0, 1], got {}", self.rate));
        }
        if self.bounds.is_empty() {
            return Err("bounds: need at least one [lo, hi] pair".into());
        }
        if self.bounds.len() != 1 && self.bounds.len() != self.r {
            return Err(format!(
                "bounds: need 1 or r={} pairs, got {}",
                self.r,
                self.bounds.len()
            ));
        }
        for (i, pair) in self.bounds.iter().enumerate() {
            if !(pair[0] < pair[1]) {
                return Err(format!(
                    "bounds[{i}]: lo must be below hi, got [{}, {}]",
                    pair[0], pair[1]
                ));
            }
        }
        self.solver().validate().map_err(|e| e.to_string())?;
        Ok(())
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            method: self.method,
            max_iters: self.max_iters,
            primal_tol: self.primal_tol,
            penalty: self.penalty,
            rank_tol: self.rank_tol,
            r: self.r,
        }
    }

    /// Bound pair for dimension `dim`.
    pub fn bound(&self, dim: usize) -> [f64; 2] {
        if self.bounds.len() == 1 {
            self.bounds[0]
        } else {
            self.bounds[dim]
        }
    }
}
