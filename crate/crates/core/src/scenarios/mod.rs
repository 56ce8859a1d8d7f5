//! Scenario settings: categories and levels, schedules, cartesian enumeration, application
//! to a network, and the parallel matrix runner with its on-disk store.

mod matrix;
pub(crate) mod store;

pub use matrix::{run_matrix, run_scenario, MatrixConfig, ScenarioOutput};
pub use store::{
    sort_flows, sort_records, FlowRow, ResultsStore, RunManifest, FLOWS_FILE, MANIFEST_FILE, RECORDS_FILE,
};

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{interpolate, LimitKind, Network, Param, TAG_ELECTROLYSIS};

pub const TAG_CARBON_CAPTURE: &str = "carbon_capture";
pub const TAG_SEQUESTRATION: &str = "sequestration";
pub const TAG_SOLID_BIOMASS: &str = "solid_biomass_potential";
pub const TAG_BIOGAS: &str = "biogas_potential";
pub const TAG_TRANSPORT: [&str; 3] = ["transport_ice", "transport_fc", "transport_bev"];

/// Anchored values with linear interpolation, an explicit value before the first anchor and
/// the last value held afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRepr", into = "ScheduleRepr")]
pub struct Schedule {
    pub anchors: BTreeMap<i32, f64>,
    pub before_first: Option<f64>,
}

/// Year keys as strings, so schedules survive flattened (buffered) deserialization.
#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    anchors: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    before_first: Option<f64>,
}

impl TryFrom<ScheduleRepr> for Schedule {
    type Error = String;

    fn try_from(r: ScheduleRepr) -> std::result::Result<Self, String> {
        let mut anchors = Vec::with_capacity(r.anchors.len());
        for (k, v) in r.anchors {
            anchors.push((k.trim().parse::<i32>().map_err(|_| format!("schedule year '{k}' is not an integer"))?, v));
        }
        Schedule::new(anchors, r.before_first).map_err(|e| e.to_string())
    }
}

impl From<Schedule> for ScheduleRepr {
    fn from(s: Schedule) -> Self {
        ScheduleRepr {
            anchors: s.anchors.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            before_first: s.before_first,
        }
    }
}

impl Schedule {
    pub fn new(anchors: impl IntoIterator<Item = (i32, f64)>, before_first: Option<f64>) -> Result<Self> {
        let anchors: BTreeMap<i32, f64> = anchors.into_iter().collect();
        if anchors.is_empty() || anchors.values().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("schedule needs finite anchor values".into()));
        }
        Ok(Schedule { anchors, before_first })
    }

    pub fn value(&self, year: i32) -> f64 {
        let first = *self.anchors.keys().next().expect("non-empty schedule");
        match self.before_first {
            Some(v) if year < first => v,
            _ => interpolate(&self.anchors, year).expect("non-empty schedule"),
        }
    }
}

pub fn schedule_value(schedule: &Schedule, horizon: i32) -> f64 {
    schedule.value(horizon)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportShift {
    Delay,
    Baseline,
    Accelerate,
}

/// Land-transport fuel shares (ICE, fuel cell, battery electric) by year.
pub type ShareTable = BTreeMap<i32, [f64; 3]>;

/// Shift a share table by one step: `delay` repeats the first row and lags by five years;
/// `accelerate` keeps the first row and leads by five years, clamping at the last row.
pub fn shift_transport(table: &ShareTable, shift: TransportShift) -> Result<ShareTable> {
    let (&first, _) = table.iter().next().ok_or_else(|| Error::InvalidArgument("empty share table".into()))?;
    let (&last, _) = table.iter().next_back().expect("non-empty");
    for (y, row) in table {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || row.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(format!("shares for {y} do not form a distribution: {row:?}")));
        }
    }
    let lookup = |y: i32| interpolate_shares(table, y.clamp(first, last));
    Ok(table
        .keys()
        .map(|&y| {
            let row = match shift {
                TransportShift::Baseline => table[&y],
                TransportShift::Delay => lookup(y - 5),
                TransportShift::Accelerate if y == first => table[&y],
                TransportShift::Accelerate => lookup(y + 5),
            };
            (y, row)
        })
        .collect())
}

/// Shares at `year`, interpolated between table rows.
pub fn interpolate_shares(table: &ShareTable, year: i32) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, v) in out.iter_mut().enumerate() {
        let col: BTreeMap<i32, f64> = table.iter().map(|(&y, r)| (y, r[k])).collect();
        *v = interpolate(&col, year).unwrap_or(0.0);
    }
    out
}

/// Parameters a level sets. Absent fields leave the network untouched.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelPayload {
    /// Permanent sequestration limit, Mt CO₂/a.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequestration_mt: Option<Schedule>,
    /// EUR per t CO₂ sequestered.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequestration_cost: Option<f64>,
    /// Multiplier on the capital-cost premium of carbon capture.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capture_cost_multiplier: Option<f64>,
    /// Solid biomass potential, TWh/a.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solid_biomass_twh: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub biogas_twh: Option<Param>,
    /// Whether green imports are capped by domestic electrolytic hydrogen.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub import_coupling: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub electrolyser_cost_multiplier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport: Option<TransportShift>,
    /// Name of the availability variant to use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weather: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(flatten)]
    pub payload: LevelPayload,
}

/// One setting with its levels, ordered pessimistic to optimistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingCategory {
    pub name: String,
    pub levels: Vec<Level>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub categories: Vec<SettingCategory>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub transport_shares: ShareTable,
}

impl ScenarioSet {
    pub fn from_json(text: &str) -> Result<Self> {
        let set: ScenarioSet = serde_json::from_str(text)?;
        set.validate()?;
        Ok(set)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut names = std::collections::BTreeSet::new();
        for c in &self.categories {
            if !names.insert(c.name.as_str()) {
                errs.push(format!("category '{}': duplicate", c.name));
            }
            if !(2..=3).contains(&c.levels.len()) {
                errs.push(format!("category '{}': {} levels, expected 2 or 3", c.name, c.levels.len()));
            }
            if c.levels.iter().map(|l| &l.label).unique().count() != c.levels.len() {
                errs.push(format!("category '{}': duplicate level labels", c.name));
            }
            if c.name.contains(['_', '-']) || c.levels.iter().any(|l| l.label.contains(['_', '-', '+', ','])) {
                errs.push(format!("category '{}': names and labels may not contain '_', '-', '+' or ','", c.name));
            }
        }
        let uses_transport = self.categories.iter().flat_map(|c| &c.levels).any(|l| l.payload.transport.is_some());
        if uses_transport {
            if let Err(e) = shift_transport(&self.transport_shares, TransportShift::Baseline) {
                errs.push(format!("transport_shares: {e}"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn category(&self, name: &str) -> Option<&SettingCategory> {
        self.categories.iter().find(|c| c.name == name)
    }

    pub fn enumerate(&self) -> Vec<Scenario> {
        enumerate_scenarios(&self.categories)
    }
}

/// One level per category.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    /// (category name, level index), in category order.
    pub levels: Vec<(String, usize)>,
}

impl Scenario {
    pub fn level(&self, category: &str) -> Option<usize> {
        self.levels.iter().find(|(c, _)| c == category).map(|&(_, l)| l)
    }

    /// Parse an id of the form `cat-label_cat-label…` against `set`.
    pub fn from_id(set: &ScenarioSet, id: &str) -> Result<Scenario> {
        let mut levels = Vec::new();
        for part in id.split('_') {
            let (cat, label) = part
                .split_once('-')
                .ok_or_else(|| Error::Parse(format!("scenario id part '{part}' is not 'category-level'")))?;
            let c = set.category(cat).ok_or_else(|| Error::Parse(format!("unknown category '{cat}' in '{id}'")))?;
            let l = c
                .levels
                .iter()
                .position(|l| l.label == label)
                .ok_or_else(|| Error::Parse(format!("unknown level '{label}' of '{cat}'")))?;
            levels.push((cat.to_string(), l));
        }
        if levels.len() != set.categories.len() {
            return Err(Error::Parse(format!("scenario id '{id}' does not assign every category")));
        }
        Ok(Scenario { id: id.to_string(), levels })
    }
}

/// Cartesian product of all levels; the last category varies fastest.
pub fn enumerate_scenarios(categories: &[SettingCategory]) -> Vec<Scenario> {
    if categories.is_empty() {
        return Vec::new();
    }
    categories
        .iter()
        .map(|c| 0..c.levels.len())
        .multi_cartesian_product()
        .map(|idx| {
            let id = categories.iter().zip(&idx).map(|(c, &l)| format!("{}-{}", c.name, c.levels[l].label)).join("_");
            let levels = categories.iter().zip(idx).map(|(c, l)| (c.name.clone(), l)).collect();
            Scenario { id, levels }
        })
        .collect()
}

/// Keep scenarios matching a selection such as `ccs=a+c,weather=a`.
pub fn select(set: &ScenarioSet, scenarios: &[Scenario], selection: &str) -> Result<Vec<Scenario>> {
    let mut wanted: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for clause in selection.split(',').map(str::trim).filter(|c| !c.is_empty()) {
        let (cat, labels) = clause
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("selection clause '{clause}' is not 'category=levels'")))?;
        let c = set.category(cat.trim()).ok_or_else(|| Error::Parse(format!("unknown category '{cat}'")))?;
        let mut idx = Vec::new();
        for label in labels.split('+').map(str::trim) {
            idx.push(
                c.levels
                    .iter()
                    .position(|l| l.label == label)
                    .ok_or_else(|| Error::Parse(format!("unknown level '{label}' of '{cat}'")))?,
            );
        }
        wanted.insert(cat.trim(), idx);
    }
    Ok(scenarios
        .iter()
        .filter(|s| wanted.iter().all(|(c, ls)| s.level(c).is_some_and(|l| ls.contains(&l))))
        .cloned()
        .collect())
}

fn require(found: bool, what: &str) -> Result<()> {
    if found {
        Ok(())
    } else {
        Err(Error::Config(format!("template has no {what}")))
    }
}

/// Apply the parameters of every level in `scenario` to a network resolved at `horizon`.
pub fn apply_scenario(template: &Network, set: &ScenarioSet, scenario: &Scenario, horizon: i32) -> Result<Network> {
    let mut net = template.clone();
    let scale = net.scaling;
    for (cat_name, level) in &scenario.levels {
        let cat = set
            .category(cat_name)
            .ok_or_else(|| Error::Config(format!("scenario '{}' uses unknown category '{cat_name}'", scenario.id)))?;
        let p = &cat
            .levels
            .get(*level)
            .ok_or_else(|| Error::Config(format!("category '{cat_name}' has no level {level}")))?
            .payload;

        if let Some(s) = &p.sequestration_mt {
            let bound = s.value(horizon) * scale.co2_t_per_mt;
            let mut found = false;
            for l in net.limits.iter_mut().filter(|l| l.kind == LimitKind::SequestrationCap) {
                l.bound = bound;
                found = true;
            }
            require(found, "sequestration cap")?;
        }
        if let Some(cost) = p.sequestration_cost {
            let mut found = false;
            for a in net.assets.iter_mut().filter(|a| a.has_tag(TAG_SEQUESTRATION)) {
                a.marginal_cost = cost;
                found = true;
            }
            require(found, "asset tagged 'sequestration'")?;
        }
        if let Some(m) = p.capture_cost_multiplier {
            let base: BTreeMap<String, f64> = template.assets.iter().map(|a| (a.id.clone(), a.capital_cost)).collect();
            let mut found = false;
            for a in net.assets.iter_mut().filter(|a| a.has_tag(TAG_CARBON_CAPTURE)) {
                let reference = a.capture_reference.as_ref().map_or(0.0, |r| base[r]);
                a.capital_cost = reference + m * (a.capital_cost - reference);
                found = true;
            }
            require(found, "asset tagged 'carbon_capture'")?;
        }
        for (param, tag) in [(&p.solid_biomass_twh, TAG_SOLID_BIOMASS), (&p.biogas_twh, TAG_BIOGAS)] {
            if let Some(v) = param {
                let bound = v.at(horizon) * scale.energy_mwh_per_twh;
                let mut found = false;
                for l in net.limits.iter_mut().filter(|l| l.tag.as_deref() == Some(tag)) {
                    l.bound = bound;
                    found = true;
                }
                require(found, &format!("limit tagged '{tag}'"))?;
            }
        }
        if let Some(on) = p.import_coupling {
            let mut found = false;
            for l in net.limits.iter_mut().filter(|l| l.kind == LimitKind::ImportCoupling) {
                l.enabled = on;
                found = true;
            }
            require(found, "import-coupling limit")?;
        }
        if let Some(m) = p.electrolyser_cost_multiplier {
            let mut found = false;
            for a in net.assets.iter_mut().filter(|a| a.has_tag(TAG_ELECTROLYSIS)) {
                a.capital_cost *= m;
                found = true;
            }
            require(found, "asset tagged 'electrolysis'")?;
        }
        if let Some(shift) = p.transport {
            let table = shift_transport(&set.transport_shares, shift)?;
            let shares = interpolate_shares(&table, horizon);
            let mut found = false;
            for (tag, share) in TAG_TRANSPORT.iter().zip(shares) {
                for a in net.assets.iter_mut().filter(|a| a.has_tag(tag)) {
                    a.demand_scale = share;
                    found = true;
                }
            }
            require(found, "transport loads")?;
        }
        if let Some(w) = &p.weather {
            let mut found = false;
            for a in net.assets.iter_mut().filter(|a| !a.availability_variants.is_empty()) {
                let v = a
                    .availability_variants
                    .get(w)
                    .ok_or_else(|| Error::Config(format!("asset '{}' has no '{w}' availability variant", a.id)))?;
                a.availability = v.clone();
                found = true;
            }
            require(found, "availability variants")?;
        }
    }
    net.validate()?;
    Ok(net)
}

#[cfg(test)]
mod tests;
