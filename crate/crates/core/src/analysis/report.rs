//! CSV tables derived from a results store. Every file is written with its header even when
//! there is nothing to report, and rows come out in a fixed order.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use itertools::Itertools;

use super::{corridor_table, sensitivity, Interval, SensitivityOptions, SubsidyTable};
use crate::error::Result;
use crate::network::lhv_mt_to_twh;
use crate::pathway::{PathwayRecord, RecordSense};
use crate::scenarios::store::{fmt_f64, fmt_opt};
use crate::scenarios::{sort_flows, ResultsStore, ScenarioSet};

pub const RANGES_FILE: &str = "ranges.csv";
pub const CORRIDOR_FILE: &str = "corridor.csv";
pub const FLOW_REPORT_FILE: &str = "energy_flows.csv";
pub const SENSITIVITY_FILE: &str = "sensitivity.csv";
pub const SUBSIDY_FILE: &str = "subsidy.csv";

#[derive(Clone, Debug, PartialEq)]
pub struct ReportOptions {
    /// Slack of the corridor table; the largest in the store when `None`.
    pub epsilon: Option<f64>,
    pub quantiles: Vec<f64>,
    /// Horizons pooled in the sensitivity fits.
    pub sensitivity_horizons: Vec<i32>,
    pub intercept: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            epsilon: None,
            quantiles: vec![0.75],
            sensitivity_horizons: vec![2040, 2045, 2050],
            intercept: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportFiles {
    pub ranges: PathBuf,
    pub corridor: PathBuf,
    pub flows: PathBuf,
    pub sensitivity: PathBuf,
}

/// Hydrogen in TWh at the lower heating value. Solver noise below zero is reported as zero.
fn twh(mt: Option<f64>) -> Option<f64> {
    mt.map(|m| lhv_mt_to_twh(m.max(0.0)).expect("non-negative finite"))
}

fn fmt_intervals(set: &[Interval], scale: fn(f64) -> f64) -> String {
    set.iter().map(|i| format!("{}:{}", fmt_f64(scale(i.lo)), fmt_f64(scale(i.hi)))).join(";")
}

fn to_twh(mt: f64) -> f64 {
    twh(Some(mt)).unwrap()
}

/// Write the report tables for `store` into `out`. Sensitivity fits need the scenario set to
/// decode levels; without it that table holds only its header.
pub fn report(
    store: &ResultsStore,
    set: Option<&ScenarioSet>,
    options: &ReportOptions,
    out: &Path,
) -> Result<ReportFiles> {
    std::fs::create_dir_all(out)?;
    let records = store.read_records()?;
    let files = ReportFiles {
        ranges: out.join(RANGES_FILE),
        corridor: out.join(CORRIDOR_FILE),
        flows: out.join(FLOW_REPORT_FILE),
        sensitivity: out.join(SENSITIVITY_FILE),
    };
    write_ranges(&records, &files.ranges)?;
    write_corridor(&records, options, &files.corridor)?;
    write_flows(store, &files.flows)?;
    write_sensitivity(&records, set, options, &files.sensitivity)?;
    Ok(files)
}

pub fn write_ranges(records: &[PathwayRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "scenario_id",
        "horizon",
        "epsilon",
        "optimal_h2_mt",
        "min_h2_mt",
        "max_h2_mt",
        "optimal_h2_twh",
        "min_h2_twh",
        "max_h2_twh",
    ])?;
    let h = |r: &PathwayRecord| r.h2_mt.filter(|_| r.is_optimal());
    let mut optimal: BTreeMap<(&str, i32), Option<f64>> = BTreeMap::new();
    let mut extremal: BTreeMap<(&str, i32, u64), [Option<f64>; 2]> = BTreeMap::new();
    for r in records {
        match (r.sense, r.epsilon) {
            (RecordSense::Optimal, _) => {
                optimal.insert((&r.scenario_id, r.horizon), h(r));
            }
            (sense, Some(eps)) => {
                let slot = usize::from(sense == RecordSense::Max);
                extremal.entry((&r.scenario_id, r.horizon, eps.to_bits())).or_default()[slot] = h(r);
            }
            (_, None) => {}
        }
    }
    let mut rows: Vec<(&str, i32, Option<f64>)> =
        extremal.keys().map(|&(s, y, e)| (s, y, Some(f64::from_bits(e)))).collect();
    let covered: BTreeSet<(&str, i32)> = rows.iter().map(|&(s, y, _)| (s, y)).collect();
    rows.extend(optimal.keys().filter(|k| !covered.contains(k)).map(|&(s, y)| (s, y, None)));
    rows.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(&b.1)).then(a.2.unwrap_or(-1.0).total_cmp(&b.2.unwrap_or(-1.0))));
    for (s, y, eps) in rows {
        let opt = optimal.get(&(s, y)).copied().flatten();
        let [lo, hi] = eps.and_then(|e| extremal.get(&(s, y, e.to_bits())).copied()).unwrap_or_default();
        w.write_record([
            s.to_string(),
            y.to_string(),
            fmt_opt(eps),
            fmt_opt(opt),
            fmt_opt(lo),
            fmt_opt(hi),
            fmt_opt(twh(opt)),
            fmt_opt(twh(lo)),
            fmt_opt(twh(hi)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_corridor(records: &[PathwayRecord], options: &ReportOptions, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = [
        "horizon",
        "epsilon",
        "scenarios",
        "excluded",
        "robust_lo_mt",
        "robust_hi_mt",
        "robust_lo_twh",
        "robust_hi_twh",
        "tapering_mt",
        "tapering_twh",
    ]
    .map(String::from)
    .to_vec();
    for q in &options.quantiles {
        header.push(format!("q{q}_mt"));
        header.push(format!("q{q}_twh"));
    }
    w.write_record(&header)?;

    let epsilon = options.epsilon.or_else(|| records.iter().filter_map(|r| r.epsilon).max_by(f64::total_cmp));
    if let Some(epsilon) = epsilon {
        let horizons: Vec<i32> = records.iter().map(|r| r.horizon).collect::<BTreeSet<_>>().into_iter().collect();
        for row in corridor_table(records, epsilon, &horizons, &options.quantiles)? {
            let lo = row.robust.map(|i| i.lo);
            let hi = row.robust.map(|i| i.hi);
            let mut fields = vec![
                row.horizon.to_string(),
                fmt_f64(epsilon),
                row.scenarios.to_string(),
                row.excluded.to_string(),
                fmt_opt(lo),
                fmt_opt(hi),
                fmt_opt(twh(lo)),
                fmt_opt(twh(hi)),
                fmt_opt(row.tapering),
                fmt_opt(twh(row.tapering)),
            ];
            for (_, set) in &row.quantiles {
                fields.push(fmt_intervals(set, |x| x));
                fields.push(fmt_intervals(set, to_twh));
            }
            // Horizons without intervals still get their quantile columns.
            fields.resize(header.len(), String::new());
            w.write_record(&fields)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_flows(store: &ResultsStore, path: &Path) -> Result<()> {
    let mut flows = store.read_flows()?;
    sort_flows(&mut flows);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "scenario_id",
        "horizon",
        "sense",
        "epsilon",
        "carrier",
        "bus",
        "source",
        "energy_mwh",
        "energy_twh",
    ])?;
    for f in &flows {
        w.write_record([
            f.scenario_id.clone(),
            f.horizon.to_string(),
            f.sense.to_string(),
            fmt_opt(f.epsilon),
            f.carrier.clone(),
            f.bus.clone(),
            f.source.clone(),
            fmt_f64(f.energy_mwh),
            fmt_f64(f.energy_mwh / 1e6),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sensitivity(
    records: &[PathwayRecord],
    set: Option<&ScenarioSet>,
    options: &ReportOptions,
    path: &Path,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["sense", "epsilon", "term", "coefficient_mt", "coefficient_twh", "observations", "dropped"])?;
    if let Some(set) = set {
        let combos: BTreeSet<(RecordSense, Option<u64>)> =
            records.iter().map(|r| (r.sense, r.epsilon.map(f64::to_bits))).collect();
        for (sense, eps) in combos {
            let opts = SensitivityOptions {
                sense,
                epsilon: eps.map(f64::from_bits),
                horizons: options.sensitivity_horizons.clone(),
                intercept: options.intercept,
            };
            let fit = match sensitivity(records, set, &opts) {
                Ok(fit) => fit,
                Err(e) => {
                    log::warn!("sensitivity for {sense} at ε = {:?} skipped: {e}", opts.epsilon);
                    continue;
                }
            };
            let terms = fit.intercept.map(|b| ("intercept".to_string(), b)).into_iter();
            for (term, coef) in terms.chain(fit.categories.iter().cloned().zip(fit.coefficients.iter().copied())) {
                w.write_record([
                    sense.to_string(),
                    fmt_opt(opts.epsilon),
                    term,
                    fmt_f64(coef),
                    fmt_f64(coef * crate::network::LHV_TWH_PER_MT),
                    fit.observations.to_string(),
                    fit.dropped.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per scenario, excluded scenarios with their reason, then a `mean` row.
pub fn write_subsidy(table: &SubsidyTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "scenario_id",
        "horizon",
        "target_mt",
        "target_twh",
        "eur_per_kg",
        "volume_eur",
        "fallback",
        "excluded",
    ])?;
    let target = [fmt_f64(table.target_mt), fmt_opt(twh(Some(table.target_mt)))];
    for (id, s) in &table.per_scenario {
        w.write_record([
            id.as_str(),
            &table.horizon.to_string(),
            &target[0],
            &target[1],
            &fmt_f64(s.eur_per_kg),
            &fmt_f64(s.volume_eur),
            if s.fallback { "true" } else { "false" },
            "",
        ])?;
    }
    for (id, reason) in &table.excluded {
        w.write_record([id.as_str(), &table.horizon.to_string(), &target[0], &target[1], "", "", "", reason.as_str()])?;
    }
    w.write_record([
        "mean",
        &table.horizon.to_string(),
        &target[0],
        &target[1],
        &fmt_opt(table.mean_eur_per_kg),
        &fmt_opt(table.mean_volume_eur),
        "",
        "",
    ])?;
    w.flush()?;
    Ok(())
}
