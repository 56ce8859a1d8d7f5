//! Post-processing of matrix records: robust corridors, sensitivity regression, subsidies and
//! report tables.
//!
//! All intervals are closed, so touching endpoints count towards coverage.

mod report;
mod sensitivity;
mod subsidy;

#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pathway::{PathwayRecord, RecordSense};

pub use report::{
    report, write_corridor, write_flows, write_ranges, write_sensitivity, write_subsidy, ReportFiles, ReportOptions,
    CORRIDOR_FILE, FLOW_REPORT_FILE, RANGES_FILE, SENSITIVITY_FILE, SUBSIDY_FILE,
};
pub use sensitivity::{level_value, sensitivity, Sensitivity, SensitivityOptions};
pub use subsidy::{subsidy, subsidy_ladder, subsidy_table, Rung, Subsidy, SubsidyTable};

/// A closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidArgument(format!("[{lo}, {hi}] is not a finite closed interval")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Piecewise-constant coverage count of a set of intervals.
///
/// `points` are the distinct endpoints in ascending order; `at_point[k]` counts the intervals
/// containing `points[k]` and `in_gap[k]` those containing the open gap `(points[k], points[k+1])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coverage {
    pub points: Vec<f64>,
    pub at_point: Vec<usize>,
    pub in_gap: Vec<usize>,
    pub total: usize,
}

/// Endpoint sweep over `intervals`.
pub fn coverage(intervals: &[Interval]) -> Coverage {
    let mut points: Vec<f64> = intervals.iter().flat_map(|i| [i.lo, i.hi]).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    // Difference arrays: an interval covers points lo..=hi and the gaps between them.
    let n = points.len();
    let mut point_delta = vec![0isize; n + 1];
    let mut gap_delta = vec![0isize; n + 1];
    for i in intervals {
        let a = points.partition_point(|&p| p < i.lo);
        let b = points.partition_point(|&p| p < i.hi);
        point_delta[a] += 1;
        point_delta[b + 1] -= 1;
        gap_delta[a] += 1;
        gap_delta[b] -= 1;
    }
    let running = |delta: &[isize], len: usize| {
        let mut acc = 0isize;
        delta[..len]
            .iter()
            .map(|d| {
                acc += d;
                acc as usize
            })
            .collect::<Vec<_>>()
    };
    Coverage {
        at_point: running(&point_delta, n),
        in_gap: running(&gap_delta, n.saturating_sub(1)),
        points,
        total: intervals.len(),
    }
}

impl Coverage {
    fn qualifies(&self, count: usize, q: f64) -> bool {
        count as f64 / self.total as f64 >= q
    }

    /// Closed intervals where coverage share is at least `q`, merged and ascending.
    pub fn at_least(&self, q: f64) -> Vec<Interval> {
        let mut out: Vec<Interval> = Vec::new();
        let mut open: Option<f64> = None;
        for (k, &p) in self.points.iter().enumerate() {
            if !self.qualifies(self.at_point[k], q) {
                continue;
            }
            let start = open.unwrap_or(p);
            let continues = k < self.in_gap.len() && self.qualifies(self.in_gap[k], q);
            if continues {
                open = Some(start);
            } else {
                out.push(Interval { lo: start, hi: p });
                open = None;
            }
        }
        out
    }

    /// Lowest point of maximum coverage. Gaps never beat their endpoints, so only points are
    /// candidates.
    pub fn peak(&self) -> Option<(f64, usize)> {
        let max = *self.at_point.iter().max()?;
        let k = self.at_point.iter().position(|&c| c == max)?;
        Some((self.points[k], max))
    }
}

fn require_nonempty(intervals: &[Interval]) -> Result<()> {
    if intervals.is_empty() {
        return Err(Error::InvalidArgument("need at least one interval".into()));
    }
    Ok(())
}

/// Intersection of all intervals; `None` when it is empty.
pub fn corridor(intervals: &[Interval]) -> Result<Option<Interval>> {
    require_nonempty(intervals)?;
    let lo = intervals.iter().map(|i| i.lo).fold(f64::NEG_INFINITY, f64::max);
    let hi = intervals.iter().map(|i| i.hi).fold(f64::INFINITY, f64::min);
    Ok((lo <= hi).then_some(Interval { lo, hi }))
}

/// Points contained in at least a share `q` of the intervals, as a union of closed intervals.
pub fn quantile_corridor(intervals: &[Interval], q: f64) -> Result<Vec<Interval>> {
    require_nonempty(intervals)?;
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidArgument(format!("quantile must lie in (0, 1], got {q}")));
    }
    Ok(coverage(intervals).at_least(q))
}

/// Lowest point of maximum coverage. When the corridor is non-empty this is its lower end.
pub fn tapering_point(intervals: &[Interval]) -> Result<f64> {
    require_nonempty(intervals)?;
    Ok(coverage(intervals).peak().map(|(p, _)| p).expect("non-empty coverage"))
}

/// Per-scenario `[min h, max h]` at one horizon and slack.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet {
    pub horizon: i32,
    pub epsilon: f64,
    pub intervals: Vec<(String, Interval)>,
    /// Scenarios whose min or max record is missing or not optimal.
    pub failed: Vec<String>,
    /// Scenarios whose lineages crossed (min above max beyond rounding).
    pub inverted: Vec<String>,
}

/// Min above max by less than this (relative to `max(1, |h|)`) is treated as rounding.
pub const INVERSION_TOLERANCE: f64 = 1e-9;

impl IntervalSet {
    pub fn from_records(records: &[PathwayRecord], horizon: i32, epsilon: f64) -> Self {
        let mut by_scenario: std::collections::BTreeMap<&str, [Option<&PathwayRecord>; 2]> = Default::default();
        for r in records.iter().filter(|r| r.horizon == horizon && r.epsilon == Some(epsilon)) {
            let slot = match r.sense {
                RecordSense::Min => 0,
                RecordSense::Max => 1,
                RecordSense::Optimal => continue,
            };
            by_scenario.entry(&r.scenario_id).or_default()[slot] = Some(r);
        }
        let mut set = IntervalSet { horizon, epsilon, intervals: Vec::new(), failed: Vec::new(), inverted: Vec::new() };
        for (id, [min, max]) in by_scenario {
            let h = |r: Option<&PathwayRecord>| r.filter(|r| r.is_optimal()).and_then(|r| r.h2_mt);
            let (Some(lo), Some(hi)) = (h(min), h(max)) else {
                set.failed.push(id.to_string());
                continue;
            };
            if lo > hi + INVERSION_TOLERANCE * hi.abs().max(1.0) {
                set.inverted.push(id.to_string());
                continue;
            }
            set.intervals.push((id.to_string(), Interval { lo: lo.min(hi), hi }));
        }
        set
    }

    pub fn bare(&self) -> Vec<Interval> {
        self.intervals.iter().map(|(_, i)| *i).collect()
    }
}

/// Corridor summary of one horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizonCorridor {
    pub horizon: i32,
    pub epsilon: f64,
    pub scenarios: usize,
    pub excluded: usize,
    pub robust: Option<Interval>,
    /// `(q, R_q)` for each requested quantile.
    pub quantiles: Vec<(f64, Vec<Interval>)>,
    /// Set only when `robust` is empty.
    pub tapering: Option<f64>,
}

/// Corridors at every horizon in `horizons`. Horizons without a single usable interval get an
/// empty summary.
pub fn corridor_table(
    records: &[PathwayRecord],
    epsilon: f64,
    horizons: &[i32],
    quantiles: &[f64],
) -> Result<Vec<HorizonCorridor>> {
    horizons
        .iter()
        .map(|&horizon| {
            let set = IntervalSet::from_records(records, horizon, epsilon);
            let intervals = set.bare();
            let mut row = HorizonCorridor {
                horizon,
                epsilon,
                scenarios: intervals.len(),
                excluded: set.failed.len() + set.inverted.len(),
                robust: None,
                quantiles: Vec::new(),
                tapering: None,
            };
            if intervals.is_empty() {
                return Ok(row);
            }
            row.robust = corridor(&intervals)?;
            for &q in quantiles {
                row.quantiles.push((q, quantile_corridor(&intervals, q)?));
            }
            if row.robust.is_none() {
                row.tapering = Some(tapering_point(&intervals)?);
            }
            Ok(row)
        })
        .collect()
}
