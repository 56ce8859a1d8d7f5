//! Bounded-variable revised simplex.
//!
//! Every row gets a logical (slack) variable so that the working system is `Ã x + s = b̃` with
//! an identity starting basis. Row senses become slack bounds: `≤` ↦ `s ∈ [0, ∞)`,
//! `≥` ↦ `s ∈ (−∞, 0]`, `=` ↦ `s = 0`. Phase 1 minimises the sum of bound violations of the
//! basic variables (composite cost recomputed each iteration); phase 2 minimises the scaled
//! objective from the phase-1 basis.
//!
//! The basis inverse is kept dense and column-major, updated by rank-one eta operations and
//! rebuilt from scratch every `refactor_interval` pivots. Pricing is Dantzig's rule with
//! lowest-index tie-breaking; after `stall_threshold` consecutive degenerate pivots it switches
//! to Bland's rule until a step makes progress. No randomness is involved, so a given problem
//! and option set always produce the same bit pattern.

use log::debug;

use super::dense::invert;
use super::kkt::verify_kkt;
use super::{LpBackend, LpSolution, SolveOptions, SolveStatus};
use crate::lp::{LpProblem, RowSense};

#[derive(Clone, Copy, Debug, Default)]
pub struct RevisedSimplex;

impl LpBackend for RevisedSimplex {
    fn name(&self) -> &str {
        "revised-simplex"
    }

    fn solve(&self, problem: &LpProblem, options: &SolveOptions) -> LpSolution {
        solve(problem, options)
    }
}

pub(crate) fn solve(problem: &LpProblem, options: &SolveOptions) -> LpSolution {
    if problem.check_dimensions().is_err() || problem.check_finite().is_err() {
        return LpSolution::failed(SolveStatus::NumericalFailure, 0);
    }
    if let Some(status) = trivially_infeasible_bounds(problem) {
        return LpSolution::failed(status, 0);
    }
    let scaled = Scaled::new(problem);
    let mut engine = Engine::new(&scaled, options);
    let status = engine.run();
    if status != SolveStatus::Optimal {
        return LpSolution::failed(status, engine.iterations);
    }
    let mut solution = engine.unscaled_solution(problem);
    let report = verify_kkt(problem, &solution, options.kkt_tol);
    match report {
        Ok(r) => {
            if !r.pass {
                debug!("KKT check failed after optimal termination: {r:?}");
                solution.status = SolveStatus::NumericalFailure;
            }
            solution.residuals = Some(r);
        }
        Err(_) => solution.status = SolveStatus::NumericalFailure,
    }
    solution
}

fn trivially_infeasible_bounds(problem: &LpProblem) -> Option<SolveStatus> {
    problem.col_lower.iter().zip(&problem.col_upper).any(|(l, u)| l > u).then_some(SolveStatus::Infeasible)
}

/// Round a positive factor to the nearest power of two so scaling is exact.
fn pow2(v: f64) -> f64 {
    if !v.is_finite() || v <= 0.0 {
        1.0
    } else {
        2f64.powi(v.log2().round() as i32)
    }
}

/// Scaled duals below this are reported as zero.
const DUAL_ZERO: f64 = 1e-12;

/// The problem after geometric-mean equilibration and objective normalisation.
struct Scaled {
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    /// Bounds for structurals followed by slacks.
    lower: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    cost_scale: f64,
}

impl Scaled {
    fn new(p: &LpProblem) -> Self {
        let m = p.num_rows();
        let n = p.num_cols();
        let mut row_scale = vec![1.0; m];
        let mut col_scale = vec![1.0; n];
        for _pass in 0..6 {
            let mut rmin = vec![f64::INFINITY; m];
            let mut rmax = vec![0.0f64; m];
            for t in &p.entries {
                let v = (t.value * row_scale[t.row] * col_scale[t.col]).abs();
                rmin[t.row] = rmin[t.row].min(v);
                rmax[t.row] = rmax[t.row].max(v);
            }
            for i in 0..m {
                if rmax[i] > 0.0 {
                    row_scale[i] *= pow2(1.0 / (rmin[i] * rmax[i]).sqrt());
                }
            }
            let mut cmin = vec![f64::INFINITY; n];
            let mut cmax = vec![0.0f64; n];
            for t in &p.entries {
                let v = (t.value * row_scale[t.row] * col_scale[t.col]).abs();
                cmin[t.col] = cmin[t.col].min(v);
                cmax[t.col] = cmax[t.col].max(v);
            }
            for j in 0..n {
                if cmax[j] > 0.0 {
                    col_scale[j] *= pow2(1.0 / (cmin[j] * cmax[j]).sqrt());
                }
            }
        }
        let mut cols = vec![Vec::new(); n];
        for t in &p.entries {
            cols[t.col].push((t.row, t.value * row_scale[t.row] * col_scale[t.col]));
        }
        let cmax = p.objective.iter().zip(&col_scale).map(|(c, s)| (c * s).abs()).fold(0.0, f64::max);
        let cost_scale = if cmax > 0.0 { pow2(cmax) } else { 1.0 };
        let cost = p.objective.iter().zip(&col_scale).map(|(c, s)| c * s / cost_scale).collect();
        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        for j in 0..n {
            lower.push(p.col_lower[j] / col_scale[j]);
            upper.push(p.col_upper[j] / col_scale[j]);
        }
        for sense in &p.row_senses {
            let (l, u) = match sense {
                RowSense::Le => (0.0, f64::INFINITY),
                RowSense::Ge => (f64::NEG_INFINITY, 0.0),
                RowSense::Eq => (0.0, 0.0),
            };
            lower.push(l);
            upper.push(u);
        }
        let rhs = p.rhs.iter().zip(&row_scale).map(|(b, r)| b * r).collect();
        Self { m, n, cols, cost, lower, upper, rhs, row_scale, col_scale, cost_scale }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable sitting at zero.
    Free,
}

enum Pricing {
    Entering { var: usize, d: f64 },
    Done,
}

enum Step {
    Pivot { row: usize, to_upper: bool, theta: f64 },
    Flip { theta: f64 },
    Unbounded,
}

struct Engine<'a> {
    p: &'a Scaled,
    opt: &'a SolveOptions,
    basis: Vec<usize>,
    state: Vec<VarState>,
    x: Vec<f64>,
    binv: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
    degenerate_run: usize,
    bland: bool,
}

impl<'a> Engine<'a> {
    fn new(p: &'a Scaled, opt: &'a SolveOptions) -> Self {
        let (m, n) = (p.m, p.n);
        let mut state = vec![VarState::Basic; n + m];
        let mut x = vec![0.0; n + m];
        for j in 0..n {
            let (l, u) = (p.lower[j], p.upper[j]);
            if l.is_finite() {
                state[j] = VarState::AtLower;
                x[j] = l;
            } else if u.is_finite() {
                state[j] = VarState::AtUpper;
                x[j] = u;
            } else {
                state[j] = VarState::Free;
            }
        }
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let mut e = Self {
            p,
            opt,
            basis: (n..n + m).collect(),
            state,
            x,
            binv,
            since_refactor: 0,
            iterations: 0,
            degenerate_run: 0,
            bland: false,
        };
        e.recompute_basics();
        e
    }

    fn column(&self, j: usize) -> ColumnRef<'a> {
        if j < self.p.n {
            ColumnRef::Sparse(&self.p.cols[j])
        } else {
            ColumnRef::Unit(j - self.p.n)
        }
    }

    fn cost(&self, j: usize) -> f64 {
        if j < self.p.n {
            self.p.cost[j]
        } else {
            0.0
        }
    }

    fn tol_for(&self, bound: f64) -> f64 {
        self.opt.primal_tol * (1.0 + bound.abs())
    }

    fn below(&self, j: usize) -> bool {
        let l = self.p.lower[j];
        l.is_finite() && self.x[j] < l - self.tol_for(l)
    }

    fn above(&self, j: usize) -> bool {
        let u = self.p.upper[j];
        u.is_finite() && self.x[j] > u + self.tol_for(u)
    }

    /// x_B = B⁻¹ (b − N x_N)
    fn recompute_basics(&mut self) {
        let m = self.p.m;
        let mut r = self.p.rhs.clone();
        for j in 0..self.p.n + m {
            if self.state[j] == VarState::Basic || self.x[j] == 0.0 {
                continue;
            }
            let v = self.x[j];
            match self.column(j) {
                ColumnRef::Sparse(col) => {
                    for &(i, a) in col {
                        r[i] -= a * v;
                    }
                }
                ColumnRef::Unit(i) => r[i] -= v,
            }
        }
        let xb = self.mul_binv(&r);
        for (pos, &var) in self.basis.iter().enumerate() {
            self.x[var] = xb[pos];
        }
    }

    /// B⁻¹ v for dense v.
    fn mul_binv(&self, v: &[f64]) -> Vec<f64> {
        let m = self.p.m;
        let mut out = vec![0.0; m];
        for (k, &vk) in v.iter().enumerate() {
            if vk == 0.0 {
                continue;
            }
            let col = &self.binv[k * m..(k + 1) * m];
            for (o, &b) in out.iter_mut().zip(col) {
                *o += b * vk;
            }
        }
        out
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.p.m;
        match self.column(j) {
            ColumnRef::Sparse(col) => {
                let mut out = vec![0.0; m];
                for &(k, a) in col {
                    let bcol = &self.binv[k * m..(k + 1) * m];
                    for (o, &b) in out.iter_mut().zip(bcol) {
                        *o += b * a;
                    }
                }
                out
            }
            ColumnRef::Unit(k) => self.binv[k * m..(k + 1) * m].to_vec(),
        }
    }

    /// yᵀ = c_Bᵀ B⁻¹
    fn duals(&self, cb: &[f64]) -> Vec<f64> {
        let m = self.p.m;
        (0..m).map(|k| self.binv[k * m..(k + 1) * m].iter().zip(cb).map(|(b, c)| b * c).sum()).collect()
    }

    fn reduced_cost(&self, j: usize, cj: f64, y: &[f64]) -> f64 {
        match self.column(j) {
            ColumnRef::Sparse(col) => cj - col.iter().map(|&(i, a)| y[i] * a).sum::<f64>(),
            ColumnRef::Unit(i) => cj - y[i],
        }
    }

    fn refactor(&mut self) -> bool {
        let m = self.p.m;
        let mut b = vec![0.0; m * m];
        for (pos, &var) in self.basis.iter().enumerate() {
            match self.column(var) {
                ColumnRef::Sparse(col) => {
                    for &(i, a) in col {
                        b[pos * m + i] = a;
                    }
                }
                ColumnRef::Unit(i) => b[pos * m + i] = 1.0,
            }
        }
        match invert(m, b, 1e-13) {
            Some(inv) => {
                self.binv = inv;
                self.since_refactor = 0;
                self.recompute_basics();
                true
            }
            None => false,
        }
    }

    fn run(&mut self) -> SolveStatus {
        // Alternate phases until a freshly refactorised basis is both primal and dual feasible.
        for _round in 0..8 {
            match self.phase(true) {
                PhaseEnd::Optimal => {}
                PhaseEnd::Stopped(s) => return s,
                PhaseEnd::Unbounded => return SolveStatus::NumericalFailure,
            }
            match self.phase(false) {
                PhaseEnd::Optimal => {}
                PhaseEnd::Stopped(s) => return s,
                PhaseEnd::Unbounded => return SolveStatus::Unbounded,
            }
            if !self.refactor() {
                return SolveStatus::NumericalFailure;
            }
            let infeasible = (0..self.p.n + self.p.m).any(|j| self.below(j) || self.above(j));
            if !infeasible {
                return SolveStatus::Optimal;
            }
            debug!("primal drift after refactorisation; re-entering phase 1");
        }
        SolveStatus::NumericalFailure
    }

    fn phase_costs(&self, phase_one: bool) -> Vec<f64> {
        self.basis
            .iter()
            .map(|&j| {
                if phase_one {
                    if self.below(j) {
                        -1.0
                    } else if self.above(j) {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.cost(j)
                }
            })
            .collect()
    }

    fn phase(&mut self, phase_one: bool) -> PhaseEnd {
        loop {
            if self.iterations >= self.opt.max_iterations {
                return PhaseEnd::Stopped(SolveStatus::Timeout);
            }
            if self.since_refactor >= self.opt.refactor_interval && !self.refactor() {
                return PhaseEnd::Stopped(SolveStatus::NumericalFailure);
            }
            let cb = self.phase_costs(phase_one);
            if phase_one && cb.iter().all(|&c| c == 0.0) {
                return PhaseEnd::Optimal;
            }
            let y = self.duals(&cb);
            let (q, d) = match self.price(&y, phase_one) {
                Pricing::Entering { var, d } => (var, d),
                Pricing::Done => {
                    if phase_one {
                        return PhaseEnd::Stopped(SolveStatus::Infeasible);
                    }
                    return PhaseEnd::Optimal;
                }
            };
            let alpha = self.ftran(q);
            let dir = if d < 0.0 { 1.0 } else { -1.0 };
            let step = self.ratio_test(q, &alpha, dir, phase_one);
            self.iterations += 1;
            match step {
                Step::Unbounded => return PhaseEnd::Unbounded,
                Step::Flip { theta } => {
                    self.apply_step(q, &alpha, dir, theta);
                    self.state[q] = if dir > 0.0 { VarState::AtUpper } else { VarState::AtLower };
                    self.x[q] = if dir > 0.0 { self.p.upper[q] } else { self.p.lower[q] };
                    self.note_progress(theta);
                }
                Step::Pivot { row, to_upper, theta } => {
                    self.apply_step(q, &alpha, dir, theta);
                    let leaving = self.basis[row];
                    let (l, u) = (self.p.lower[leaving], self.p.upper[leaving]);
                    if to_upper {
                        self.state[leaving] = VarState::AtUpper;
                        self.x[leaving] = u;
                    } else {
                        self.state[leaving] = VarState::AtLower;
                        self.x[leaving] = l;
                    }
                    if l == f64::NEG_INFINITY && u == f64::INFINITY {
                        self.state[leaving] = VarState::Free;
                    }
                    self.basis[row] = q;
                    self.state[q] = VarState::Basic;
                    self.update_binv(row, &alpha);
                    self.note_progress(theta);
                }
            }
        }
    }

    fn note_progress(&mut self, theta: f64) {
        if theta <= 1e-12 {
            self.degenerate_run += 1;
            if self.degenerate_run >= self.opt.stall_threshold {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = false;
        }
    }

    fn apply_step(&mut self, q: usize, alpha: &[f64], dir: f64, theta: f64) {
        if theta == 0.0 {
            return;
        }
        self.x[q] += dir * theta;
        for (pos, &var) in self.basis.iter().enumerate() {
            self.x[var] -= dir * theta * alpha[pos];
        }
    }

    fn update_binv(&mut self, r: usize, alpha: &[f64]) {
        let m = self.p.m;
        let ar = alpha[r];
        for k in 0..m {
            let col = &mut self.binv[k * m..(k + 1) * m];
            let v = col[r] / ar;
            if v != 0.0 {
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= alpha[i] * v;
                }
            }
            col[r] = v;
        }
        self.since_refactor += 1;
    }

    fn price(&self, y: &[f64], phase_one: bool) -> Pricing {
        let tol = self.opt.dual_tol;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.p.n + self.p.m {
            let st = self.state[j];
            if st == VarState::Basic {
                continue;
            }
            if self.p.lower[j] == self.p.upper[j] {
                continue;
            }
            let cj = if phase_one { 0.0 } else { self.cost(j) };
            let d = self.reduced_cost(j, cj, y);
            let eligible = match st {
                VarState::AtLower => d < -tol,
                VarState::AtUpper => d > tol,
                VarState::Free => d.abs() > tol,
                VarState::Basic => false,
            };
            if !eligible {
                continue;
            }
            if self.bland {
                return Pricing::Entering { var: j, d };
            }
            match best {
                Some((_, bd)) if bd.abs() >= d.abs() => {}
                _ => best = Some((j, d)),
            }
        }
        match best {
            Some((var, d)) => Pricing::Entering { var, d },
            None => Pricing::Done,
        }
    }

    fn ratio_test(&self, q: usize, alpha: &[f64], dir: f64, phase_one: bool) -> Step {
        let piv = self.opt.pivot_tol;
        let mut candidates: Vec<(usize, f64, bool)> = Vec::new();
        for (pos, &var) in self.basis.iter().enumerate() {
            let a = alpha[pos];
            if a.abs() <= piv {
                continue;
            }
            let rate = -dir * a;
            let (l, u) = (self.p.lower[var], self.p.upper[var]);
            let xv = self.x[var];
            let hit = if phase_one && self.below(var) {
                (rate > 0.0).then(|| ((l - xv) / rate, false))
            } else if phase_one && self.above(var) {
                (rate < 0.0).then(|| ((xv - u) / -rate, true))
            } else if rate < 0.0 {
                l.is_finite().then(|| ((xv - l).max(0.0) / -rate, false))
            } else {
                u.is_finite().then(|| ((u - xv).max(0.0) / rate, true))
            };
            if let Some((ratio, to_upper)) = hit {
                candidates.push((pos, ratio, to_upper));
            }
        }
        let flip = {
            let (l, u) = (self.p.lower[q], self.p.upper[q]);
            (l.is_finite() && u.is_finite()).then_some(u - l)
        };
        let min_ratio = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        if let Some(f) = flip {
            if f <= min_ratio {
                return Step::Flip { theta: f };
            }
        }
        if !min_ratio.is_finite() {
            return Step::Unbounded;
        }
        let slack = 1e-12 * (1.0 + min_ratio);
        let mut chosen: Option<(usize, f64, bool)> = None;
        for &(pos, ratio, to_upper) in &candidates {
            if ratio > min_ratio + slack {
                continue;
            }
            chosen = match chosen {
                None => Some((pos, ratio, to_upper)),
                Some(c) => {
                    let better = if self.bland {
                        self.basis[pos] < self.basis[c.0]
                    } else {
                        let (na, ca) = (alpha[pos].abs(), alpha[c.0].abs());
                        na > ca || (na == ca && self.basis[pos] < self.basis[c.0])
                    };
                    if better {
                        Some((pos, ratio, to_upper))
                    } else {
                        Some(c)
                    }
                }
            };
        }
        let (row, theta, to_upper) = chosen.expect("finite minimum ratio has a candidate");
        Step::Pivot { row, to_upper, theta: theta.max(0.0) }
    }

    fn unscaled_solution(&self, problem: &LpProblem) -> LpSolution {
        let p = self.p;
        let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost(j)).collect();
        // Scaled costs are O(1); duals this small are rounding left in B⁻¹, and on a degenerate
        // optimum (all duals truly zero) they would otherwise dominate the KKT check.
        let y_scaled: Vec<f64> =
            self.duals(&cb).into_iter().map(|y| if y.abs() < DUAL_ZERO { 0.0 } else { y }).collect();
        let primal: Vec<f64> = (0..p.n).map(|j| self.x[j] * p.col_scale[j]).collect();
        let duals: Vec<f64> = y_scaled.iter().zip(&p.row_scale).map(|(y, r)| y * r * p.cost_scale).collect();
        let reduced_costs: Vec<f64> = (0..p.n)
            .map(|j| {
                if self.state[j] == VarState::Basic {
                    0.0
                } else {
                    self.reduced_cost(j, self.cost(j), &y_scaled) * p.cost_scale / p.col_scale[j]
                }
            })
            .collect();
        LpSolution {
            status: SolveStatus::Optimal,
            objective: problem.objective_value(&primal),
            primal,
            duals,
            reduced_costs,
            iterations: self.iterations,
            residuals: None,
        }
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    Stopped(SolveStatus),
}

enum ColumnRef<'a> {
    Sparse(&'a [(usize, f64)]),
    Unit(usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolveStatus;

    const INF: f64 = f64::INFINITY;

    fn two_var() -> LpProblem {
        // min x1 + 2 x2  s.t.  x1 + x2 >= 2, x1 <= 1.5, x >= 0
        let mut lp = LpProblem::new();
        let x1 = lp.add_column("x1", 1.0, 0.0, INF);
        let x2 = lp.add_column("x2", 2.0, 0.0, INF);
        lp.add_row("demand", RowSense::Ge, 2.0, &[(x1, 1.0), (x2, 1.0)]);
        lp.add_row("cap", RowSense::Le, 1.5, &[(x1, 1.0)]);
        lp
    }

    #[test]
    fn two_variable_example() {
        let sol = solve(&two_var(), &SolveOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal[0] - 1.5).abs() < 1e-12);
        assert!((sol.primal[1] - 0.5).abs() < 1e-12);
        assert!((sol.objective - 2.5).abs() < 1e-12);
        // Shadow prices: demand +2 (>= row), cap -1 (<= row).
        assert!((sol.duals[0] - 2.0).abs() < 1e-12);
        assert!((sol.duals[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_nonnegative_minimum() {
        let mut lp = LpProblem::new();
        lp.add_column("x", 1.0, 0.0, INF);
        let sol = solve(&lp, &SolveOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.primal, vec![0.0]);
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LpProblem::new();
        let x = lp.add_column("x", 1.0, f64::NEG_INFINITY, INF);
        lp.add_row("lo", RowSense::Ge, 1.0, &[(x, 1.0)]);
        lp.add_row("hi", RowSense::Le, 0.0, &[(x, 1.0)]);
        assert_eq!(solve(&lp, &SolveOptions::default()).status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LpProblem::new();
        let x = lp.add_column("x", -1.0, 0.0, INF);
        lp.add_row("r", RowSense::Ge, 1.0, &[(x, 1.0)]);
        assert_eq!(solve(&lp, &SolveOptions::default()).status, SolveStatus::Unbounded);
    }

    #[test]
    fn iteration_cap_reports_timeout() {
        let opts = SolveOptions { max_iterations: 0, ..SolveOptions::default() };
        assert_eq!(solve(&two_var(), &opts).status, SolveStatus::Timeout);
    }

    #[test]
    fn free_and_upper_bounded_columns() {
        // min -x - y  s.t. x + y <= 3 with x free, y <= 1, and x - y = 0.5
        let mut lp = LpProblem::new();
        let x = lp.add_column("x", -1.0, f64::NEG_INFINITY, INF);
        let y = lp.add_column("y", -1.0, f64::NEG_INFINITY, 1.0);
        lp.add_row("sum", RowSense::Le, 3.0, &[(x, 1.0), (y, 1.0)]);
        lp.add_row("diff", RowSense::Eq, 0.5, &[(x, 1.0), (y, -1.0)]);
        let sol = solve(&lp, &SolveOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal[0] - 1.5).abs() < 1e-12);
        assert!((sol.primal[1] - 1.0).abs() < 1e-12);
        assert!((sol.objective + 2.5).abs() < 1e-12);
    }

    #[test]
    fn deterministic_bit_pattern() {
        let a = solve(&two_var(), &SolveOptions::default());
        let b = solve(&two_var(), &SolveOptions::default());
        assert_eq!(a, b);
    }
}
