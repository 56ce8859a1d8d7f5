//! Standard-form linear programs.
//!
//! An [`LpProblem`] is `min c·x + offset` subject to labelled rows `a_i·x {≤,=,≥} b_i` and
//! column bounds `l ≤ x ≤ u`. The constraint matrix is held as sparse triplets in canonical
//! order (row-major, columns ascending within a row, duplicates summed, explicit zeros dropped),
//! so two problems built from the same inputs compare equal entry by entry.

mod mps;

pub use mps::{read_mps, write_mps};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl RowSense {
    pub fn symbol(self) -> &'static str {
        match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    /// Constant added to `c·x` (e.g. fixed costs of already-built capacity).
    pub objective_offset: f64,
    pub col_lower: Vec<f64>,
    pub col_upper: Vec<f64>,
    pub col_labels: Vec<String>,
    pub row_senses: Vec<RowSense>,
    pub rhs: Vec<f64>,
    pub row_labels: Vec<String>,
    pub entries: Vec<Triplet>,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn add_column(&mut self, label: impl Into<String>, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.col_lower.push(lower);
        self.col_upper.push(upper);
        self.col_labels.push(label.into());
        self.objective.len() - 1
    }

    /// Append a row. Coefficients may repeat a column; they are summed.
    pub fn add_row(
        &mut self,
        label: impl Into<String>,
        sense: RowSense,
        rhs: f64,
        coefficients: &[(usize, f64)],
    ) -> usize {
        let row = self.rhs.len();
        let mut coefs = coefficients.to_vec();
        coefs.sort_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coefs.len());
        for (c, v) in coefs {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        self.entries.extend(merged.into_iter().filter(|&(_, v)| v != 0.0).map(|(col, value)| Triplet {
            row,
            col,
            value,
        }));
        self.row_senses.push(sense);
        self.rhs.push(rhs);
        self.row_labels.push(label.into());
        row
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.row_labels.iter().position(|l| l == label)
    }

    pub fn col_index(&self, label: &str) -> Option<usize> {
        self.col_labels.iter().position(|l| l == label)
    }

    /// Column-wise sparse view: `columns()[j]` lists `(row, value)`.
    pub fn columns(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.num_cols()];
        for t in &self.entries {
            cols[t.col].push((t.row, t.value));
        }
        cols
    }

    /// Row-wise sparse view: `rows()[i]` lists `(col, value)`.
    pub fn rows(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.num_rows()];
        for t in &self.entries {
            rows[t.row].push((t.col, t.value));
        }
        rows
    }

    /// `A·x` for every row.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.num_rows()];
        for t in &self.entries {
            act[t.row] += t.value * x[t.col];
        }
        act
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>() + self.objective_offset
    }

    pub fn check_dimensions(&self) -> Result<()> {
        let n = self.num_cols();
        let m = self.num_rows();
        if self.col_lower.len() != n || self.col_upper.len() != n || self.col_labels.len() != n {
            return Err(Error::Dimension(format!(
                "column arrays disagree: objective {n}, lower {}, upper {}, labels {}",
                self.col_lower.len(),
                self.col_upper.len(),
                self.col_labels.len()
            )));
        }
        if self.row_senses.len() != m || self.row_labels.len() != m {
            return Err(Error::Dimension(format!(
                "row arrays disagree: rhs {m}, senses {}, labels {}",
                self.row_senses.len(),
                self.row_labels.len()
            )));
        }
        if let Some(t) = self.entries.iter().find(|t| t.row >= m || t.col >= n) {
            return Err(Error::Dimension(format!("entry ({}, {}) outside {m}x{n} matrix", t.row, t.col)));
        }
        Ok(())
    }

    /// Rejects NaN anywhere and infinities outside of bounds.
    pub fn check_finite(&self) -> Result<()> {
        let bad = |v: &f64| !v.is_finite();
        if self.objective.iter().any(bad) || !self.objective_offset.is_finite() {
            return Err(Error::InvalidArgument("non-finite objective coefficient".into()));
        }
        if self.rhs.iter().any(bad) {
            return Err(Error::InvalidArgument("non-finite right-hand side".into()));
        }
        if self.entries.iter().any(|t| bad(&t.value)) {
            return Err(Error::InvalidArgument("non-finite matrix coefficient".into()));
        }
        for (j, (l, u)) in self.col_lower.iter().zip(&self.col_upper).enumerate() {
            if l.is_nan() || u.is_nan() || *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                return Err(Error::InvalidArgument(format!(
                    "invalid bounds [{l}, {u}] on column {}",
                    self.col_labels[j]
                )));
            }
        }
        Ok(())
    }
}
