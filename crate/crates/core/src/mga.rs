//! ε-near-optimal extremisation of electrolytic hydrogen output.
//!
//! For horizon `i` the budget row `c·x ≤ (1+ε)·c*ᵢ` (with `c*ᵢ` from the cost-optimal pathway)
//! is added and the objective replaced by `±h·x`. The min and max lineages each inherit their
//! fleet from their own solution at `i−1`.
//!
//! `μ = d(h*)/d(budget)` is reported in MWh of hydrogen per EUR: `μ ≥ 0` for maximisation,
//! `μ ≤ 0` for minimisation, and 0 when the budget does not bind.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{LpProblem, RowSense};
use crate::pathway::{PathwayRun, Planner, RecordSense, StepSolve};
use crate::solver::{LpBackend, LpSolution, SolveOptions};

pub const BUDGET_ROW: &str = "budget";

/// Relative allowance on the budget. At ε = 0 the near-optimal set is a face of the feasible
/// region, and without it rounding in `c*` can leave that face empty.
pub const BUDGET_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MgaSense {
    Min,
    Max,
}

impl MgaSense {
    /// Sign of `h` in the internal minimisation.
    pub fn objective_sign(self) -> f64 {
        match self {
            MgaSense::Min => 1.0,
            MgaSense::Max => -1.0,
        }
    }

    pub fn record_sense(self) -> RecordSense {
        match self {
            MgaSense::Min => RecordSense::Min,
            MgaSense::Max => RecordSense::Max,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackSpec {
    pub epsilon: f64,
    pub sense: MgaSense,
}

impl SlackSpec {
    pub fn new(epsilon: f64, sense: MgaSense) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("ε must be finite and ≥ 0, got {epsilon}")));
        }
        Ok(SlackSpec { epsilon, sense })
    }
}

/// Copy of `problem` with the budget row `c·x + offset ≤ (1+ε)·c* + τ·|c*|` appended and the
/// objective replaced by `sign·h` (`τ` is [`BUDGET_TOLERANCE`]).
pub fn add_cost_budget(problem: &LpProblem, c_star: Option<f64>, spec: SlackSpec, h: &[f64]) -> Result<LpProblem> {
    let c_star = c_star.ok_or(Error::MissingOptimum(0))?;
    if !(spec.epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("ε must be ≥ 0, got {}", spec.epsilon)));
    }
    if h.len() != problem.num_cols() {
        return Err(Error::Dimension(format!(
            "target has {} coefficients for {} columns",
            h.len(),
            problem.num_cols()
        )));
    }
    let mut out = problem.clone();
    let coefs: Vec<(usize, f64)> = problem.objective.iter().copied().enumerate().filter(|&(_, c)| c != 0.0).collect();
    let rhs = (1.0 + spec.epsilon) * c_star + BUDGET_TOLERANCE * c_star.abs() - problem.objective_offset;
    out.add_row(BUDGET_ROW, RowSense::Le, rhs, &coefs);
    let sign = spec.sense.objective_sign();
    out.objective = h.iter().map(|v| sign * v).collect();
    out.objective_offset = 0.0;
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Extremum {
    pub solution: LpSolution,
    /// `h·x` at the solution, in the units of `h`.
    pub h: Option<f64>,
    pub mu: Option<f64>,
}

/// Solve a budgeted problem from [`add_cost_budget`].
pub fn extremize(
    problem: &LpProblem,
    sense: MgaSense,
    backend: &dyn LpBackend,
    options: &SolveOptions,
) -> Result<Extremum> {
    let row =
        problem.row_index(BUDGET_ROW).ok_or_else(|| Error::InvalidArgument("problem has no budget row".into()))?;
    let solution = backend.solve(problem, options);
    if !solution.is_optimal() {
        return Ok(Extremum { solution, h: None, mu: None });
    }
    let sign = sense.objective_sign();
    let h = sign * (solution.objective - problem.objective_offset);
    let mu = sign * solution.duals[row];
    Ok(Extremum { solution, h: Some(h), mu: Some(mu) })
}

/// Near-optimal lineage of `spec` along `horizons`, budgeted against `optimal`.
pub fn run_extremal_pathway(
    planner: &Planner,
    horizons: &[i32],
    spec: SlackSpec,
    optimal: &PathwayRun,
) -> Result<PathwayRun> {
    for &y in horizons {
        if optimal.optimum(y).is_none() {
            return Err(Error::MissingOptimum(y));
        }
    }
    planner.run_chain(horizons, spec.sense.record_sense(), Some(spec.epsilon), |year, tr| {
        let h = tr.target_coefficients();
        let problem = add_cost_budget(&tr.problem, optimal.optimum(year), spec, &h).map_err(|e| {
            if let Error::MissingOptimum(_) = e {
                Error::MissingOptimum(year)
            } else {
                e
            }
        })?;
        let ext = extremize(&problem, spec.sense, planner.backend, &planner.options.solve)?;
        Ok(StepSolve { solution: ext.solution, mu: ext.mu })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::RevisedSimplex;

    /// min x₁ + x₂ s.t. x₁ + x₂ ≥ 1, x ≥ 0.
    fn two_var() -> LpProblem {
        let mut lp = LpProblem::new();
        let a = lp.add_column("x1", 1.0, 0.0, f64::INFINITY);
        let b = lp.add_column("x2", 1.0, 0.0, f64::INFINITY);
        lp.add_row("demand", RowSense::Ge, 1.0, &[(a, 1.0), (b, 1.0)]);
        lp
    }

    #[test]
    fn budget_rhs() {
        let lp = two_var();
        let p = add_cost_budget(&lp, Some(100.0), SlackSpec::new(0.0, MgaSense::Max).unwrap(), &[1.0, 0.0]).unwrap();
        assert_eq!(p.rhs[p.row_index(BUDGET_ROW).unwrap()], 100.0 + 100.0 * BUDGET_TOLERANCE);
        let p = add_cost_budget(&lp, Some(100.0), SlackSpec::new(0.05, MgaSense::Max).unwrap(), &[1.0, 0.0]).unwrap();
        assert!((p.rhs[p.row_index(BUDGET_ROW).unwrap()] - 105.0).abs() < 1e-6);
        assert_eq!(p.objective, vec![-1.0, -0.0]);
        assert!(matches!(
            add_cost_budget(&lp, None, SlackSpec::new(0.05, MgaSense::Max).unwrap(), &[1.0, 0.0]),
            Err(Error::MissingOptimum(_))
        ));
        assert!(SlackSpec::new(-0.1, MgaSense::Min).is_err());
    }

    #[test]
    fn budget_subtracts_offset() {
        let mut lp = two_var();
        lp.objective_offset = 40.0;
        let p = add_cost_budget(&lp, Some(100.0), SlackSpec::new(0.1, MgaSense::Min).unwrap(), &[1.0, 0.0]).unwrap();
        assert!((p.rhs[p.row_index(BUDGET_ROW).unwrap()] - 70.0).abs() < 1e-6);
        assert_eq!(p.objective_offset, 0.0);
    }

    fn extreme(eps: f64, sense: MgaSense) -> Extremum {
        let lp = two_var();
        let p = add_cost_budget(&lp, Some(1.0), SlackSpec::new(eps, sense).unwrap(), &[1.0, 0.0]).unwrap();
        extremize(&p, sense, &RevisedSimplex, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn two_variable_extremes() {
        let e = extreme(0.1, MgaSense::Max);
        assert!((e.h.unwrap() - 1.1).abs() < 1e-8);
        // One more unit of budget buys one more unit of x₁.
        assert!((e.mu.unwrap() - 1.0).abs() < 1e-12);
        let e = extreme(0.0, MgaSense::Max);
        assert!((e.h.unwrap() - 1.0).abs() < 1e-8);
        for eps in [0.0, 0.1, 0.5] {
            let e = extreme(eps, MgaSense::Min);
            assert!(e.h.unwrap().abs() < 1e-12);
            assert!(e.mu.unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn extremize_requires_budget_row() {
        assert!(extremize(&two_var(), MgaSense::Max, &RevisedSimplex, &SolveOptions::default()).is_err());
    }
}
