//! Least-squares sensitivity of hydrogen output to the scenario settings.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pathway::{PathwayRecord, RecordSense};
use crate::scenarios::{Scenario, ScenarioSet};

/// Dummy value of level `index` out of `levels`: evenly spaced on `[0, 1]`, so three levels map
/// to 0, 0.5, 1 and two to 0, 1.
pub fn level_value(index: usize, levels: usize) -> f64 {
    if levels < 2 {
        return 0.0;
    }
    index as f64 / (levels - 1) as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensitivityOptions {
    pub sense: RecordSense,
    /// Must be `None` for the optimal sense.
    pub epsilon: Option<f64>,
    /// Horizons pooled into one fit.
    pub horizons: Vec<i32>,
    pub intercept: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sensitivity {
    /// Categories in set order, excluding those seen at a single level.
    pub categories: Vec<String>,
    pub coefficients: Vec<f64>,
    pub intercept: Option<f64>,
    /// Categories dropped because the data holds only one of their levels.
    pub constant_categories: Vec<String>,
    pub observations: usize,
    /// Matching records dropped because they did not solve.
    pub dropped: usize,
}

impl Sensitivity {
    pub fn coefficient(&self, category: &str) -> Option<f64> {
        self.categories.iter().position(|c| c == category).map(|k| self.coefficients[k])
    }
}

/// Fit `h = Σ aⱼ xⱼ (+ b)` over the records matching `options`, with `xⱼ` the dummy value of the
/// scenario's level in category `j`.
pub fn sensitivity(records: &[PathwayRecord], set: &ScenarioSet, options: &SensitivityOptions) -> Result<Sensitivity> {
    let mut rows: Vec<(Scenario, f64)> = Vec::new();
    let mut dropped = 0;
    for r in records {
        if r.sense != options.sense || r.epsilon != options.epsilon || !options.horizons.contains(&r.horizon) {
            continue;
        }
        match (r.is_optimal(), r.h2_mt) {
            (true, Some(h)) => rows.push((Scenario::from_id(set, &r.scenario_id)?, h)),
            _ => dropped += 1,
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no solved {} records at ε = {:?} on horizons {:?}",
            options.sense, options.epsilon, options.horizons
        )));
    }

    let mut categories = Vec::new();
    let mut constant_categories = Vec::new();
    for (j, cat) in set.categories.iter().enumerate() {
        let first = rows[0].0.levels[j].1;
        if rows.iter().all(|(s, _)| s.levels[j].1 == first) {
            constant_categories.push(cat.name.clone());
        } else {
            categories.push(j);
        }
    }

    let offset = usize::from(options.intercept);
    let p = categories.len() + offset;
    let x = DMatrix::from_fn(rows.len(), p, |i, k| {
        if k < offset {
            return 1.0;
        }
        let j = categories[k - offset];
        level_value(rows[i].0.levels[j].1, set.categories[j].levels.len())
    });
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|(_, h)| *h));

    let names: Vec<String> = categories.iter().map(|&j| set.categories[j].name.clone()).collect();
    let dependent = dependent_columns(&x);
    if !dependent.is_empty() {
        let named = dependent
            .into_iter()
            .map(|k| if k < offset { "intercept".to_string() } else { names[k - offset].clone() })
            .collect();
        return Err(Error::RankDeficient(named));
    }

    let beta = least_squares(&x, &y)?;
    Ok(Sensitivity {
        categories: names,
        coefficients: beta.iter().skip(offset).copied().collect(),
        intercept: options.intercept.then(|| beta[0]),
        constant_categories,
        observations: rows.len(),
        dropped,
    })
}

fn rank(m: &DMatrix<f64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let tol = sv.max() * (m.nrows().max(m.ncols()) as f64) * f64::EPSILON;
    sv.iter().filter(|&&s| s > tol).count()
}

/// Columns that add nothing to the span of the columns before them.
fn dependent_columns(x: &DMatrix<f64>) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    let mut dependent = Vec::new();
    for k in 0..x.ncols() {
        let mut trial = kept.clone();
        trial.push(k);
        if rank(&x.select_columns(&trial)) > kept.len() {
            kept = trial;
        } else {
            dependent.push(k);
        }
    }
    dependent
}

fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    if x.nrows() < x.ncols() {
        return Err(Error::InvalidArgument(format!("{} observations for {} coefficients", x.nrows(), x.ncols())));
    }
    let qr = x.clone().qr();
    let rhs = qr.q().transpose() * y;
    qr.r()
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::Internal("singular triangular factor after rank check".into()))
}
