//! LP solving: the backend contract, the reference revised simplex engine and KKT checks.
//!
//! # Dual sign convention
//!
//! Every backend reports row duals as shadow prices of the *minimisation* problem,
//! `y_i = ∂(optimal objective)/∂b_i`. Consequently, at an optimum:
//!
//! - `≤` rows have `y_i ≤ 0`,
//! - `≥` rows have `y_i ≥ 0`,
//! - `=` rows are free.
//!
//! Column reduced costs are `z_j = c_j − a_jᵀy`; `z_j ≥ 0` at a lower bound and `z_j ≤ 0` at
//! an upper bound.

mod dense;
mod kkt;
mod simplex;

pub use kkt::{verify_kkt, KktReport};
pub use simplex::RevisedSimplex;

use serde::{Deserialize, Serialize};

use crate::lp::LpProblem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
    Timeout,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::NumericalFailure => "numerical_failure",
            SolveStatus::Timeout => "timeout",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "optimal" => SolveStatus::Optimal,
            "infeasible" => SolveStatus::Infeasible,
            "unbounded" => SolveStatus::Unbounded,
            "numerical_failure" => SolveStatus::NumericalFailure,
            "timeout" => SolveStatus::Timeout,
            _ => return None,
        })
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Primal feasibility tolerance on the scaled problem.
    pub primal_tol: f64,
    /// Reduced-cost tolerance on the scaled problem.
    pub dual_tol: f64,
    pub pivot_tol: f64,
    /// Relative tolerance used by the post-solve KKT check.
    pub kkt_tol: f64,
    pub max_iterations: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub stall_threshold: usize,
    /// Rank-one updates between fresh basis inversions.
    pub refactor_interval: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            primal_tol: 1e-9,
            dual_tol: 1e-9,
            pivot_tol: 1e-9,
            kkt_tol: 1e-8,
            max_iterations: 200_000,
            stall_threshold: 50,
            refactor_interval: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: SolveStatus,
    pub primal: Vec<f64>,
    /// One dual per row, see the module docs for the sign convention.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    /// `c·x + offset`.
    pub objective: f64,
    pub iterations: usize,
    pub residuals: Option<KktReport>,
}

impl LpSolution {
    pub fn failed(status: SolveStatus, iterations: usize) -> Self {
        Self {
            status,
            primal: Vec::new(),
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            objective: f64::NAN,
            iterations,
            residuals: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Any engine that returns primal values, row duals (in the documented convention) and a status.
pub trait LpBackend: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, problem: &LpProblem, options: &SolveOptions) -> LpSolution;
}
