use serde::{Deserialize, Serialize};

use super::LpSolution;
use crate::error::{Error, Result};
use crate::lp::{LpProblem, RowSense};

/// Optimality residuals of a primal/dual pair.
///
/// The `*_abs` fields are raw magnitudes in problem units; the unsuffixed fields are the
/// normalised versions compared against the tolerance:
///
/// - primal: row violations divided by `1 + |bᵢ| + Σⱼ|aᵢⱼxⱼ|`, bound violations by `1 + |bound|`,
/// - dual: wrong-signed row duals and reduced costs divided by `1 + ‖c‖∞`,
/// - complementarity: `max |dual × slack|` divided by `1 + S`,
/// - gap: `|c·x − dual objective|` divided by `1 + S`,
///
/// where `S` sums the magnitudes of the terms of both objectives (`Σ|cⱼxⱼ| + Σ|bᵢyᵢ| + Σ|zⱼ·boundⱼ|`).
/// Using magnitudes rather than `|c·x|` keeps the test relative when an objective nearly
/// cancels, as it does for a target functional extremised at zero. Likewise a row with zero
/// right-hand side that balances large flows is judged against the size of those flows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub primal_abs: f64,
    pub dual_abs: f64,
    pub complementarity_abs: f64,
    pub gap_abs: f64,
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        self.primal.max(self.dual).max(self.complementarity).max(self.gap)
    }
}

/// Check a claimed optimal pair against the KKT conditions of `problem`, using the
/// sign convention documented in [`crate::solver`]. Reduced costs are recomputed from the
/// row duals, so only `primal` and `duals` of the solution are consulted.
pub fn verify_kkt(problem: &LpProblem, solution: &LpSolution, tol: f64) -> Result<KktReport> {
    problem.check_dimensions()?;
    let (m, n) = (problem.num_rows(), problem.num_cols());
    if solution.primal.len() != n || solution.duals.len() != m {
        return Err(Error::Dimension(format!(
            "solution has {} primal / {} dual values for a {m}x{n} problem",
            solution.primal.len(),
            solution.duals.len()
        )));
    }
    let x = &solution.primal;
    let y = &solution.duals;
    let act = problem.row_activity(x);
    let mut row_size = vec![0.0f64; m];
    for t in &problem.entries {
        row_size[t.row] += (t.value * x[t.col]).abs();
    }
    let primal_obj: f64 = problem.objective.iter().zip(x).map(|(c, v)| c * v).sum();
    let cnorm = problem.objective.iter().fold(0.0f64, |a, c| a.max(c.abs()));

    let mut primal_abs = 0.0f64;
    let mut primal_rel = 0.0f64;
    let mut dual_abs = 0.0f64;
    let mut comp_abs = 0.0f64;
    let mut dual_obj = 0.0;
    let mut magnitude: f64 = problem.objective.iter().zip(x).map(|(c, v)| (c * v).abs()).sum();

    for i in 0..m {
        let b = problem.rhs[i];
        let viol = match problem.row_senses[i] {
            RowSense::Le => (act[i] - b).max(0.0),
            RowSense::Ge => (b - act[i]).max(0.0),
            RowSense::Eq => (act[i] - b).abs(),
        };
        primal_abs = primal_abs.max(viol);
        primal_rel = primal_rel.max(viol / (1.0 + b.abs() + row_size[i]));
        let sign_viol = match problem.row_senses[i] {
            RowSense::Le => y[i].max(0.0),
            RowSense::Ge => (-y[i]).max(0.0),
            RowSense::Eq => 0.0,
        };
        dual_abs = dual_abs.max(sign_viol);
        comp_abs = comp_abs.max((y[i] * (act[i] - b)).abs());
        dual_obj += b * y[i];
        magnitude += (b * y[i]).abs();
    }

    let mut z = problem.objective.clone();
    for t in &problem.entries {
        z[t.col] -= t.value * y[t.row];
    }
    for j in 0..n {
        let (l, u) = (problem.col_lower[j], problem.col_upper[j]);
        let lv = (l - x[j]).max(0.0);
        let uv = (x[j] - u).max(0.0);
        let viol = lv.max(uv);
        primal_abs = primal_abs.max(viol);
        let bound = if lv > 0.0 {
            l
        } else if uv > 0.0 {
            u
        } else {
            0.0
        };
        primal_rel = primal_rel.max(viol / (1.0 + bound.abs()));

        let zl = z[j].max(0.0);
        let zu = (-z[j]).max(0.0);
        // Positive reduced cost needs a finite lower bound, negative needs a finite upper.
        let mut dv = 0.0f64;
        if l.is_finite() {
            dual_obj += zl * l;
            magnitude += (zl * l).abs();
            comp_abs = comp_abs.max(zl * (x[j] - l).abs());
        } else {
            dv = dv.max(zl);
        }
        if u.is_finite() {
            dual_obj -= zu * u;
            magnitude += (zu * u).abs();
            comp_abs = comp_abs.max(zu * (u - x[j]).abs());
        } else {
            dv = dv.max(zu);
        }
        dual_abs = dual_abs.max(dv);
    }

    let gap_abs = (primal_obj - dual_obj).abs();
    let denom = 1.0 + magnitude;
    let dual_rel = dual_abs / (1.0 + cnorm);
    let comp_rel = comp_abs / denom;
    let gap_rel = gap_abs / denom;
    let pass = primal_rel <= tol && dual_rel <= tol && comp_rel <= tol && gap_rel <= tol;
    Ok(KktReport {
        primal_abs,
        dual_abs,
        complementarity_abs: comp_abs,
        gap_abs,
        primal: primal_rel,
        dual: dual_rel,
        complementarity: comp_rel,
        gap: gap_rel,
        tolerance: tol,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolveStatus;

    fn two_var() -> LpProblem {
        let mut lp = LpProblem::new();
        let x1 = lp.add_column("x1", 1.0, 0.0, f64::INFINITY);
        let x2 = lp.add_column("x2", 2.0, 0.0, f64::INFINITY);
        lp.add_row("demand", RowSense::Ge, 2.0, &[(x1, 1.0), (x2, 1.0)]);
        lp.add_row("cap", RowSense::Le, 1.5, &[(x1, 1.0)]);
        lp
    }

    fn pair(x: Vec<f64>, y: Vec<f64>) -> LpSolution {
        LpSolution {
            status: SolveStatus::Optimal,
            primal: x,
            duals: y,
            reduced_costs: vec![],
            objective: 0.0,
            iterations: 0,
            residuals: None,
        }
    }

    #[test]
    fn hand_built_optimal_pair_passes() {
        // Duals by hand: x2 basic ⇒ y_demand = c2 = 2; x1 basic ⇒ 1 = y_demand + y_cap ⇒ y_cap = -1.
        let r = verify_kkt(&two_var(), &pair(vec![1.5, 0.5], vec![2.0, -1.0]), 1e-8).unwrap();
        assert!(r.pass);
        assert!(r.max_residual() <= 1e-12, "{r:?}");
    }

    #[test]
    fn perturbed_primal_reports_injected_violation() {
        let r = verify_kkt(&two_var(), &pair(vec![1.5 + 1e-3, 0.5], vec![2.0, -1.0]), 1e-8).unwrap();
        assert!((r.primal_abs - 1e-3).abs() < 1e-12);
        assert!(!r.pass);
    }

    #[test]
    fn empty_problem_passes_vacuously() {
        let r = verify_kkt(&LpProblem::new(), &pair(vec![], vec![]), 1e-8).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_residual(), 0.0);
    }

    #[test]
    fn wrong_lengths_rejected() {
        assert!(matches!(verify_kkt(&two_var(), &pair(vec![1.0], vec![]), 1e-8), Err(Error::Dimension(_))));
    }
}
