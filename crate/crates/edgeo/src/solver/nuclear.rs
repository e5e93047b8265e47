//! Nuclear norm recovery of the anchor-mobile Gram block.
//!
//! Minimize `||B||_*` subject to zero column sums and the sampled
//! difference constraints `B[i, j] - B[last, j] = F~[i, j]`. Solved by
//! operator splitting: a singular-value soft-threshold step alternating
//! with an exact projection onto the affine constraint set (the constraint
//! groups are mutually orthogonal per column, so the projection has a
//! closed form). The penalty is rebalanced x2 / /2 whenever the primal and
//! dual residuals drift more than a factor of ten apart.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::sampling::ObservationSet;
use crate::scalar::Scalar;

use super::SolverConfig;

/// Output of [`recover_b_nuclear`].
#[derive(Debug, Clone)]
pub struct NuclearNormSolve<T: Scalar> {
    /// Recovered `m x n` Gram block.
    pub b: DMatrix<T>,
    /// Nuclear norm of each thresholded iterate.
    pub objective_history: Vec<T>,
    /// Whether both convergence tests passed within the iteration budget;
    /// when false, `b` is the best (final) iterate.
    pub converged: bool,
    pub iterations: usize,
    /// Max absolute constraint violation of the returned iterate.
    pub constraint_residual: T,
    /// Largest column-sum deviation seen across all iterates; the affine
    /// projection keeps iterates in the zero-column-sum space, so this
    /// stays at round-off level.
    pub max_colsum_drift: T,
}

/// Per-column constraint data: sampled rows and their reduced targets.
struct Constraints<T> {
    per_column: Vec<Vec<(usize, T)>>,
    m: usize,
}

impl<T: Scalar> Constraints<T> {
    fn from_observations(obs: &ObservationSet<T>) -> Self {
        let mut per_column: Vec<Vec<(usize, T)>> = vec![Vec::new(); obs.mobiles()];
        for (&(i, j), &value) in obs.reduced() {
            per_column[j].push((i, value));
        }
        Self {
            per_column,
            m: obs.anchors(),
        }
    }

    /// Orthogonal projection onto {zero column sums} intersected with the
    /// sampled difference constraints, column by column.
    ///
    /// The column-sum normal `1` is orthogonal to every difference normal
    /// `e_i - e_last`, and the difference Gram is `I + 1 1^T` with the
    /// closed-form inverse `I - 1 1^T / (k + 1)`.
    fn project(&self, x: &mut DMatrix<T>) {
        let m = self.m;
        let last = m - 1;
        let inv_m = T::one() / T::from_count(m);
        for (j, rows) in self.per_column.iter().enumerate() {
            let col_sum = x.column(j).sum();

            if !rows.is_empty() {
                let k1 = T::from_count(rows.len() + 1);
                let mut res_sum = T::zero();
                let residuals: Vec<T> = rows
                    .iter()
                    .map(|&(i, target)| {
                        let r = x[(i, j)] - x[(last, j)] - target;
                        res_sum += r;
                        r
                    })
                    .collect();
                let shift = res_sum / k1;
                let mut w_sum = T::zero();
                for (&(i, _), &r) in rows.iter().zip(residuals.iter()) {
                    let w = r - shift;
                    x[(i, j)] -= w;
                    w_sum += w;
                }
                x[(last, j)] += w_sum;
            }

            let mean = col_sum * inv_m;
            for i in 0..m {
                x[(i, j)] -= mean;
            }
        }
    }

    /// Max absolute violation over all constraints.
    fn residual(&self, x: &DMatrix<T>) -> T {
        let last = self.m - 1;
        let mut worst = T::zero();
        for (j, rows) in self.per_column.iter().enumerate() {
            worst = worst.max(x.column(j).sum().abs());
            for &(i, target) in rows {
                worst = worst.max((x[(i, j)] - x[(last, j)] - target).abs());
            }
        }
        worst
    }
}

/// Singular-value soft threshold; returns the thresholded matrix and its
/// nuclear norm.
fn soft_threshold<T: Scalar>(x: &DMatrix<T>, tau: T) -> (DMatrix<T>, T) {
    let svd = x.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let v_t = svd.v_t.as_ref().expect("svd with v_t");
    let mut nuclear = T::zero();
    let mut scaled = u.clone();
    for (idx, &sv) in svd.singular_values.iter().enumerate() {
        let shrunk = (sv - tau).max(T::zero());
        nuclear += shrunk;
        for row in 0..scaled.nrows() {
            scaled[(row, idx)] = u[(row, idx)] * shrunk;
        }
    }
    (&scaled * v_t, nuclear)
}

/// Recover `B` by nuclear norm minimization over the sampled constraints.
///
/// Convergence is declared when the constraint residual of the thresholded
/// iterate and the relative change between successive iterates both drop
/// below `cfg.primal_tol`. Running out of iterations is not an error: the
/// final iterate is returned with `converged = false`.
pub fn recover_b_nuclear<T: Scalar>(
    obs: &ObservationSet<T>,
    cfg: &SolverConfig,
) -> Result<NuclearNormSolve<T>> {
    cfg.validate()?;
    let m = obs.anchors();
    let n = obs.mobiles();
    let constraints = Constraints::from_observations(obs);
    let tol = T::from_double(cfg.primal_tol);
    let mut rho = T::from_double(cfg.penalty);
    let ten = T::from_double(10.0);
    let two = T::from_double(2.0);

    let mut z = DMatrix::<T>::zeros(m, n);
    constraints.project(&mut z);
    let mut dual = DMatrix::<T>::zeros(m, n);
    let mut b = DMatrix::<T>::zeros(m, n);

    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut max_colsum_drift = T::zero();

    for iter in 0..cfg.max_iters {
        iterations = iter + 1;

        let (b_next, nuclear) = soft_threshold(&(&z - &dual), T::one() / rho);
        history.push(nuclear);
        let change = (&b_next - &b).norm() / (T::one() + b.norm());
        b = b_next;

        for j in 0..n {
            max_colsum_drift = max_colsum_drift.max(b.column(j).sum().abs());
        }

        let mut z_next = &b + &dual;
        constraints.project(&mut z_next);
        let primal_res = (&b - &z_next).norm();
        let dual_res = rho * (&z_next - &z).norm();
        dual += &b - &z_next;
        z = z_next;

        let constraint_res = constraints.residual(&b);
        if constraint_res < tol && change < tol {
            converged = true;
            break;
        }

        if primal_res > ten * dual_res {
            rho *= two;
            dual /= two;
        } else if dual_res > ten * primal_res {
            rho /= two;
            dual *= two;
        }
    }

    let constraint_residual = constraints.residual(&b);
    Ok(NuclearNormSolve {
        b,
        objective_history: history,
        converged,
        iterations,
        constraint_residual,
        max_colsum_drift,
    })
}
