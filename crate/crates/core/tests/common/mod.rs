//! Test-only oracles. Nothing here calls into the solver under test.
#![allow(dead_code)]

use corridor_core::lp::{LpProblem, RowSense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random feasible, bounded LP: boxed columns, mixed row senses, rows built around an
/// interior point so feasibility is guaranteed.
pub fn random_lp(seed: u64, n: usize, m: usize) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lp = LpProblem::new();
    let mut x0 = Vec::with_capacity(n);
    for j in 0..n {
        let lower = if rng.random_bool(0.2) { -(rng.random_range(1..=5) as f64) } else { 0.0 };
        let upper = lower + rng.random_range(1..=10) as f64;
        let cost = rng.random_range(-10..=10) as f64;
        lp.add_column(format!("x{j}"), cost, lower, upper);
        x0.push(lower + (upper - lower) * rng.random_range(0.1..0.9));
    }
    for i in 0..m {
        let mut coefs = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.6) {
                coefs.push((j, rng.random_range(-5..=5) as f64));
            }
        }
        if coefs.iter().all(|c| c.1 == 0.0) {
            coefs.push((rng.random_range(0..n), 1.0));
        }
        let act: f64 = coefs.iter().map(|&(j, a)| a * x0[j]).sum();
        let roll: f64 = rng.random();
        let (sense, rhs) = if roll < 0.45 {
            (RowSense::Le, (act + rng.random_range(0.0..3.0)).round())
        } else if roll < 0.9 {
            (RowSense::Ge, (act - rng.random_range(0.0..3.0)).round())
        } else {
            (RowSense::Eq, act)
        };
        // Rounding may cut off x0 but keeps most instances feasible; infeasible ones are
        // handled by the oracle too.
        lp.add_row(format!("r{i}"), sense, rhs, &coefs);
    }
    lp
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&r, &s| a[r][k].abs().partial_cmp(&a[s][k].abs()).unwrap())?;
        if a[piv][k].abs() < 1e-10 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for r in 0..n {
            if r != k {
                let f = a[r][k] / a[k][k];
                if f != 0.0 {
                    for c in k..n {
                        a[r][c] -= f * a[k][c];
                    }
                    b[r] -= f * b[k];
                }
            }
        }
    }
    Some((0..n).map(|k| b[k] / a[k][k]).collect())
}

/// Optimal objective (without offset) by enumerating every basic solution of a problem with
/// finite column bounds. `None` when no vertex is feasible.
pub fn vertex_enumeration_optimum(lp: &LpProblem) -> Option<f64> {
    let n = lp.num_cols();
    let rows = lp.rows();
    // Every row and bound as a hyperplane; a vertex is a feasible point where n independent
    // ones are active.
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut a = vec![0.0; n];
        for &(j, v) in row {
            a[j] = v;
        }
        planes.push((a, lp.rhs[i]));
    }
    for j in 0..n {
        for bound in [lp.col_lower[j], lp.col_upper[j]] {
            assert!(bound.is_finite(), "oracle needs finite bounds");
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            planes.push((a, bound));
        }
    }
    let feasible = |x: &[f64]| -> bool {
        let act = lp.row_activity(x);
        let tol = 1e-9;
        act.iter().enumerate().all(|(i, &a)| {
            let b = lp.rhs[i];
            let t = tol * (1.0 + b.abs());
            match lp.row_senses[i] {
                RowSense::Le => a <= b + t,
                RowSense::Ge => a >= b - t,
                RowSense::Eq => (a - b).abs() <= t,
            }
        }) && x.iter().enumerate().all(|(j, &v)| {
            v >= lp.col_lower[j] - tol * (1.0 + lp.col_lower[j].abs())
                && v <= lp.col_upper[j] + tol * (1.0 + lp.col_upper[j].abs())
        })
    };
    let mut best: Option<f64> = None;
    let mut consider = |subset: &[usize]| {
        let a: Vec<Vec<f64>> = subset.iter().map(|&k| planes[k].0.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&k| planes[k].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if feasible(&x) {
                let obj: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
    };
    let all: Vec<usize> = (0..planes.len()).collect();
    for subset in combinations(&all, n) {
        consider(&subset);
    }
    best
}

pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}
